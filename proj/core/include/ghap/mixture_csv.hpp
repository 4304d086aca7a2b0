#pragma once

#include "ghap/mixture.hpp"

#include <iosfwd>
#include <string>

namespace ghap {

/// Plain-text codec for 2D mixtures (the splat PLY schema is 3D-specific).
/// First line is the fixed header
///   weight,mean_x,mean_y,cov_xx,cov_xy,cov_yx,cov_yy
/// followed by one component per row, values printed with 17 significant
/// digits so write -> read is lossless and files are byte-deterministic.
GaussianMixture read_mixture_csv(std::istream& in);
GaussianMixture read_mixture_csv_file(const std::string& path);

void write_mixture_csv(std::ostream& out, const GaussianMixture& mixture);
void write_mixture_csv_file(const std::string& path, const GaussianMixture& mixture);

} // namespace ghap
