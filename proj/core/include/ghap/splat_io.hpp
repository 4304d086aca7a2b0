#pragma once

#include "ghap/mixture.hpp"

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>

namespace ghap {

/// Raw on-disk splat fields, in file order. 62 float32 values per record.
struct SplatRecord {
    std::array<float, 3> position{};
    std::array<float, 3> normal{};
    std::array<float, 3> sh_dc{};
    std::array<float, 45> sh_rest{};
    float opacity_logit = 0.0f;
    std::array<float, 3> log_scale{};
    std::array<float, 4> quaternion{1.0f, 0.0f, 0.0f, 0.0f}; // w first
};

inline constexpr std::size_t kSplatPropertyCount = 62;
inline constexpr std::size_t kSplatRecordBytes = kSplatPropertyCount * 4;

/// Activated opacity. The activated value is what the mixture uses as the
/// component weight.
double sigmoid(double x);

/// Inverse sigmoid with the input clamped to [1e-6, 1 - 1e-6] so the logit
/// stays finite.
double opacity_logit(double activated);

/// Sigma = R * diag(exp(s))^2 * R^T with the quaternion normalized first
/// (w-first convention). Throws NumericError on a zero quaternion.
Eigen::Matrix3d decode_covariance(const std::array<float, 3>& log_scale,
                                  const std::array<float, 4>& quaternion);

/// Eigendecomposes Sigma (symmetrized first) into log-scales sorted
/// descending and the proper-rotation quaternion with non-negative w.
/// Eigenvalues are floored at 1e-12 * max(lambda_max, 1e-12) before the log.
/// Throws NumericError("not PSD") when the smallest eigenvalue is below
/// -1e-6 * largest.
std::pair<std::array<float, 3>, std::array<float, 4>>
encode_covariance(const Eigen::Matrix3d& covariance);

/// Conversion between the raw record and the in-memory primitive. The
/// primitive's weight is the activated opacity; the full payload (including
/// the raw logit) is kept in the appearance.
GaussianPrimitive record_to_primitive(const SplatRecord& record);
SplatRecord primitive_to_record(const GaussianPrimitive& primitive, std::size_t index);

/// Reads a binary little-endian 3DGS PLY checkpoint (the community-standard
/// 62-property vertex layout) into a dim-3 mixture, component order equal to
/// file order. Throws IoError on schema mismatch, ASCII encoding or a
/// truncated payload; NumericError on non-finite fields or zero quaternions.
GaussianMixture read_splats(std::istream& in);
GaussianMixture read_splats_file(const std::string& path);

/// Writes the same layout. Every component must carry an appearance payload;
/// the opacity written is the payload's raw logit, not the mixture weight.
void write_splats(std::ostream& out, const GaussianMixture& mixture);
void write_splats_file(const std::string& path, const GaussianMixture& mixture);

} // namespace ghap
