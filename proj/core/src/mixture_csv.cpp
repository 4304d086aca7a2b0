#include "ghap/mixture_csv.hpp"

#include "ghap/errors.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace ghap {

namespace {

constexpr const char* kHeader = "weight,mean_x,mean_y,cov_xx,cov_xy,cov_yx,cov_yy";

std::vector<double> parse_row(const std::string& line, std::size_t row) {
    std::vector<double> values;
    std::istringstream fields(line);
    std::string cell;
    while (std::getline(fields, cell, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(cell, &used);
        } catch (const std::exception&) {
            throw IoError("csv row " + std::to_string(row) + ": bad number '" + cell + "'");
        }
        if (used != cell.size()) {
            throw IoError("csv row " + std::to_string(row) + ": bad number '" + cell + "'");
        }
        values.push_back(v);
    }
    if (values.size() != 7) {
        throw IoError("csv row " + std::to_string(row) + ": expected 7 columns, got " +
                      std::to_string(values.size()));
    }
    return values;
}

} // namespace

GaussianMixture read_mixture_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw IoError("empty mixture csv");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != kHeader) {
        throw IoError("schema mismatch: expected csv header '" + std::string(kHeader) + "'");
    }

    GaussianMixture mixture;
    mixture.dim = 2;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const std::vector<double> v = parse_row(line, row);
        GaussianPrimitive p;
        p.weight = v[0];
        p.mean = Eigen::Vector2d(v[1], v[2]);
        p.covariance = Eigen::Matrix2d();
        p.covariance << v[3], v[4], v[5], v[6];
        validate_primitive(p, row);
        mixture.components.push_back(std::move(p));
        ++row;
    }
    return mixture;
}

GaussianMixture read_mixture_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path + "' for reading");
    }
    return read_mixture_csv(in);
}

void write_mixture_csv(std::ostream& out, const GaussianMixture& mixture) {
    if (mixture.dim != 2) {
        throw IoError("mixture csv is 2D-only");
    }
    out << kHeader << "\n";
    char buf[512];
    for (const auto& c : mixture.components) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      c.weight, c.mean[0], c.mean[1], c.covariance(0, 0),
                      c.covariance(0, 1), c.covariance(1, 0), c.covariance(1, 1));
        out << buf;
    }
    if (!out) {
        throw IoError("mixture csv: stream write failed");
    }
}

void write_mixture_csv_file(const std::string& path, const GaussianMixture& mixture) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    write_mixture_csv(out, mixture);
}

} // namespace ghap
