#include "ghap/splat_io.hpp"

#include "ghap/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace ghap {

namespace {

std::vector<std::string> splat_property_names() {
    std::vector<std::string> names = {"x", "y", "z", "nx", "ny", "nz",
                                      "f_dc_0", "f_dc_1", "f_dc_2"};
    for (int i = 0; i < 45; ++i) {
        names.push_back("f_rest_" + std::to_string(i));
    }
    names.push_back("opacity");
    for (int i = 0; i < 3; ++i) {
        names.push_back("scale_" + std::to_string(i));
    }
    for (int i = 0; i < 4; ++i) {
        names.push_back("rot_" + std::to_string(i));
    }
    return names;
}

float load_f32_le(const unsigned char* p) {
    std::uint32_t bits;
    if constexpr (std::endian::native == std::endian::little) {
        std::memcpy(&bits, p, 4);
    } else {
        bits = std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 |
               std::uint32_t(p[2]) << 16 | std::uint32_t(p[3]) << 24;
    }
    float f;
    std::memcpy(&f, &bits, 4);
    return f;
}

void store_f32_le(unsigned char* p, float f) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    if constexpr (std::endian::native == std::endian::little) {
        std::memcpy(p, &bits, 4);
    } else {
        p[0] = static_cast<unsigned char>(bits);
        p[1] = static_cast<unsigned char>(bits >> 8);
        p[2] = static_cast<unsigned char>(bits >> 16);
        p[3] = static_cast<unsigned char>(bits >> 24);
    }
}

std::string next_header_line(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw IoError("unexpected end of stream while reading PLY header");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    return line;
}

Eigen::Matrix3d rotation_from_quaternion(double w, double x, double y, double z) {
    Eigen::Matrix3d r;
    r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
         2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
         2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
    return r;
}

std::array<float, 4> quaternion_from_rotation(const Eigen::Matrix3d& r) {
    // Shepperd's method: pick the largest diagonal combination for stability.
    double w, x, y, z;
    const double trace = r.trace();
    if (trace > 0.0) {
        const double s = std::sqrt(trace + 1.0) * 2.0;
        w = 0.25 * s;
        x = (r(2, 1) - r(1, 2)) / s;
        y = (r(0, 2) - r(2, 0)) / s;
        z = (r(1, 0) - r(0, 1)) / s;
    } else if (r(0, 0) > r(1, 1) && r(0, 0) > r(2, 2)) {
        const double s = std::sqrt(1.0 + r(0, 0) - r(1, 1) - r(2, 2)) * 2.0;
        w = (r(2, 1) - r(1, 2)) / s;
        x = 0.25 * s;
        y = (r(0, 1) + r(1, 0)) / s;
        z = (r(0, 2) + r(2, 0)) / s;
    } else if (r(1, 1) > r(2, 2)) {
        const double s = std::sqrt(1.0 + r(1, 1) - r(0, 0) - r(2, 2)) * 2.0;
        w = (r(0, 2) - r(2, 0)) / s;
        x = (r(0, 1) + r(1, 0)) / s;
        y = 0.25 * s;
        z = (r(1, 2) + r(2, 1)) / s;
    } else {
        const double s = std::sqrt(1.0 + r(2, 2) - r(0, 0) - r(1, 1)) * 2.0;
        w = (r(1, 0) - r(0, 1)) / s;
        x = (r(0, 2) + r(2, 0)) / s;
        y = (r(1, 2) + r(2, 1)) / s;
        z = 0.25 * s;
    }
    double norm = std::sqrt(w * w + x * x + y * y + z * z);
    double sign = (w < 0.0) ? -1.0 : 1.0; // canonical: non-negative w
    norm *= sign;
    return {static_cast<float>(w / norm), static_cast<float>(x / norm),
            static_cast<float>(y / norm), static_cast<float>(z / norm)};
}

} // namespace

double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double opacity_logit(double activated) {
    const double a = std::clamp(activated, 1e-6, 1.0 - 1e-6);
    return std::log(a / (1.0 - a));
}

Eigen::Matrix3d decode_covariance(const std::array<float, 3>& log_scale,
                                  const std::array<float, 4>& quaternion) {
    const double w = quaternion[0], x = quaternion[1], y = quaternion[2], z = quaternion[3];
    const double norm = std::sqrt(w * w + x * x + y * y + z * z);
    if (!(norm > 1e-12)) {
        throw NumericError("decode_covariance: zero quaternion");
    }
    const Eigen::Matrix3d r = rotation_from_quaternion(w / norm, x / norm, y / norm, z / norm);
    Eigen::Vector3d scale2;
    for (int i = 0; i < 3; ++i) {
        scale2[i] = std::exp(2.0 * static_cast<double>(log_scale[i]));
    }
    Eigen::Matrix3d cov = r * scale2.asDiagonal() * r.transpose();
    return 0.5 * (cov + cov.transpose());
}

std::pair<std::array<float, 3>, std::array<float, 4>>
encode_covariance(const Eigen::Matrix3d& covariance) {
    const Eigen::Matrix3d sym = 0.5 * (covariance + covariance.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(sym);
    Eigen::Vector3d lambda = eig.eigenvalues();   // ascending
    Eigen::Matrix3d v = eig.eigenvectors();

    const double hi = lambda[2];
    if (lambda[0] < -1e-6 * std::max(hi, 0.0)) {
        throw NumericError("encode_covariance: not PSD");
    }

    // Descending eigenvalue order.
    lambda.reverseInPlace();
    v = v.rowwise().reverse().eval();
    if (v.determinant() < 0.0) {
        v.col(2) = -v.col(2);
    }

    const double floor = 1e-12 * std::max(lambda[0], 1e-12);
    std::array<float, 3> log_scale{};
    for (int i = 0; i < 3; ++i) {
        log_scale[i] = static_cast<float>(0.5 * std::log(std::max(lambda[i], floor)));
    }
    return {log_scale, quaternion_from_rotation(v)};
}

GaussianPrimitive record_to_primitive(const SplatRecord& record) {
    GaussianPrimitive p;
    p.mean = Eigen::Vector3d(record.position[0], record.position[1], record.position[2]);
    p.covariance = decode_covariance(record.log_scale, record.quaternion);
    p.weight = sigmoid(record.opacity_logit);
    Appearance a;
    a.opacity_logit = record.opacity_logit;
    a.sh_dc = record.sh_dc;
    a.sh_rest = record.sh_rest;
    a.normal = record.normal;
    p.appearance = a;
    return p;
}

SplatRecord primitive_to_record(const GaussianPrimitive& primitive, std::size_t index) {
    if (!primitive.appearance) {
        throw IoError("component " + std::to_string(index) + " has no appearance payload");
    }
    if (primitive.dim() != 3) {
        throw IoError("component " + std::to_string(index) + " is not 3-dimensional");
    }
    SplatRecord rec;
    for (int i = 0; i < 3; ++i) {
        rec.position[i] = static_cast<float>(primitive.mean[i]);
    }
    try {
        auto [log_scale, quat] = encode_covariance(primitive.covariance);
        rec.log_scale = log_scale;
        rec.quaternion = quat;
    } catch (const NumericError& e) {
        throw NumericError("component " + std::to_string(index) + ": " + e.what());
    }
    const Appearance& a = *primitive.appearance;
    rec.opacity_logit = a.opacity_logit;
    rec.sh_dc = a.sh_dc;
    rec.sh_rest = a.sh_rest;
    rec.normal = a.normal;
    return rec;
}

GaussianMixture read_splats(std::istream& in) {
    if (next_header_line(in) != "ply") {
        throw IoError("schema mismatch: missing ply magic");
    }
    std::string line = next_header_line(in);
    if (line.rfind("format ascii", 0) == 0) {
        throw IoError("unsupported encoding: ASCII PLY");
    }
    if (line != "format binary_little_endian 1.0") {
        throw IoError("unsupported encoding: " + line);
    }

    const std::vector<std::string> expected = splat_property_names();
    std::size_t vertex_count = 0;
    bool saw_element = false;
    std::size_t prop_index = 0;

    for (line = next_header_line(in); line != "end_header"; line = next_header_line(in)) {
        if (line.rfind("comment", 0) == 0 || line.rfind("obj_info", 0) == 0) {
            continue;
        }
        if (line.rfind("element ", 0) == 0) {
            if (saw_element) {
                throw IoError("schema mismatch: more than one element");
            }
            std::istringstream fields(line);
            std::string kw, name;
            long long count = -1;
            fields >> kw >> name >> count;
            if (name != "vertex" || count < 0) {
                throw IoError("schema mismatch: expected 'element vertex <n>', got '" + line + "'");
            }
            vertex_count = static_cast<std::size_t>(count);
            saw_element = true;
            continue;
        }
        if (line.rfind("property ", 0) == 0) {
            if (!saw_element) {
                throw IoError("schema mismatch: property before element");
            }
            if (prop_index >= expected.size()) {
                throw IoError("schema mismatch: unexpected extra property '" + line + "'");
            }
            const std::string want = "property float " + expected[prop_index];
            if (line != want) {
                throw IoError("schema mismatch: expected '" + want + "', got '" + line + "'");
            }
            ++prop_index;
            continue;
        }
        throw IoError("schema mismatch: unrecognized header line '" + line + "'");
    }
    if (!saw_element) {
        throw IoError("schema mismatch: no vertex element");
    }
    if (prop_index != expected.size()) {
        throw IoError("schema mismatch: missing property '" + expected[prop_index] + "'");
    }

    std::vector<unsigned char> payload(vertex_count * kSplatRecordBytes);
    in.read(reinterpret_cast<char*>(payload.data()),
            static_cast<std::streamsize>(payload.size()));
    if (static_cast<std::size_t>(in.gcount()) != payload.size()) {
        throw IoError("unexpected end of stream: truncated splat payload");
    }

    GaussianMixture mixture;
    mixture.dim = 3;
    mixture.components.reserve(vertex_count);
    for (std::size_t i = 0; i < vertex_count; ++i) {
        const unsigned char* base = payload.data() + i * kSplatRecordBytes;
        float values[kSplatPropertyCount];
        for (std::size_t k = 0; k < kSplatPropertyCount; ++k) {
            values[k] = load_f32_le(base + 4 * k);
            if (!std::isfinite(values[k])) {
                throw NumericError("record " + std::to_string(i) + ": non-finite field '" +
                                   expected[k] + "'");
            }
        }
        SplatRecord rec;
        std::copy_n(values + 0, 3, rec.position.begin());
        std::copy_n(values + 3, 3, rec.normal.begin());
        std::copy_n(values + 6, 3, rec.sh_dc.begin());
        std::copy_n(values + 9, 45, rec.sh_rest.begin());
        rec.opacity_logit = values[54];
        std::copy_n(values + 55, 3, rec.log_scale.begin());
        std::copy_n(values + 58, 4, rec.quaternion.begin());
        try {
            mixture.components.push_back(record_to_primitive(rec));
        } catch (const NumericError& e) {
            throw NumericError("record " + std::to_string(i) + ": " + e.what());
        }
    }
    return mixture;
}

GaussianMixture read_splats_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path + "' for reading");
    }
    return read_splats(in);
}

void write_splats(std::ostream& out, const GaussianMixture& mixture) {
    if (mixture.dim != 3) {
        throw IoError("write_splats: mixture must be 3-dimensional");
    }
    out << "ply\nformat binary_little_endian 1.0\nelement vertex "
        << mixture.size() << "\n";
    for (const std::string& name : splat_property_names()) {
        out << "property float " << name << "\n";
    }
    out << "end_header\n";

    std::vector<unsigned char> buf(kSplatRecordBytes);
    for (std::size_t i = 0; i < mixture.size(); ++i) {
        const SplatRecord rec = primitive_to_record(mixture.components[i], i);
        float values[kSplatPropertyCount];
        std::copy_n(rec.position.begin(), 3, values + 0);
        std::copy_n(rec.normal.begin(), 3, values + 3);
        std::copy_n(rec.sh_dc.begin(), 3, values + 6);
        std::copy_n(rec.sh_rest.begin(), 45, values + 9);
        values[54] = rec.opacity_logit;
        std::copy_n(rec.log_scale.begin(), 3, values + 55);
        std::copy_n(rec.quaternion.begin(), 4, values + 58);
        for (std::size_t k = 0; k < kSplatPropertyCount; ++k) {
            store_f32_le(buf.data() + 4 * k, values[k]);
        }
        out.write(reinterpret_cast<const char*>(buf.data()),
                  static_cast<std::streamsize>(buf.size()));
    }
    if (!out) {
        throw IoError("write_splats: stream write failed");
    }
}

void write_splats_file(const std::string& path, const GaussianMixture& mixture) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    write_splats(out, mixture);
}

} // namespace ghap
