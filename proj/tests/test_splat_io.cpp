#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ghap/errors.hpp"
#include "ghap/rng.hpp"
#include "ghap/splat_io.hpp"

#include <cmath>
#include <sstream>

using namespace ghap;

namespace {

// Random splat with a plausible payload; covariance comes from the decode
// path so it is PSD by construction.
GaussianPrimitive random_splat(Rng& rng) {
    SplatRecord rec;
    for (auto& v : rec.position) {
        v = static_cast<float>(rng.next_in(-5, 5));
    }
    for (auto& v : rec.normal) {
        v = static_cast<float>(rng.next_in(-1, 1));
    }
    for (auto& v : rec.sh_dc) {
        v = static_cast<float>(rng.next_in(-2, 2));
    }
    for (auto& v : rec.sh_rest) {
        v = static_cast<float>(rng.next_in(-1, 1));
    }
    rec.opacity_logit = static_cast<float>(rng.next_in(-4, 4));
    for (auto& v : rec.log_scale) {
        v = static_cast<float>(rng.next_in(-2, 1));
    }
    double norm = 0.0;
    for (auto& v : rec.quaternion) {
        v = static_cast<float>(rng.next_normal());
        norm += static_cast<double>(v) * v;
    }
    if (norm < 1e-6) {
        rec.quaternion = {1, 0, 0, 0};
    }
    return record_to_primitive(rec);
}

GaussianMixture random_scene(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    GaussianMixture m;
    m.dim = 3;
    for (std::size_t i = 0; i < n; ++i) {
        m.components.push_back(random_splat(rng));
    }
    return m;
}

Eigen::Matrix3d random_psd(Rng& rng, double max_condition) {
    // Eigenvalues spread up to the requested condition number.
    const double hi = std::exp(rng.next_in(-2, 2));
    const double ratio = std::exp(rng.next_in(0.0, std::log(max_condition)));
    Eigen::Vector3d lambda(hi, hi / std::exp(rng.next_in(0.0, std::log(ratio))), hi / ratio);
    double w = rng.next_normal(), x = rng.next_normal(), y = rng.next_normal(),
           z = rng.next_normal();
    const double norm = std::sqrt(w * w + x * x + y * y + z * z) + 1e-300;
    w /= norm;
    x /= norm;
    y /= norm;
    z /= norm;
    Eigen::Matrix3d r;
    r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
        2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
        2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
    Eigen::Matrix3d cov = r * lambda.asDiagonal() * r.transpose();
    return 0.5 * (cov + cov.transpose());
}

} // namespace

TEST_CASE("sigmoid and logit") {
    CHECK(sigmoid(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    for (double x = -10.0; x <= 10.0; x += 0.5) {
        CHECK(std::abs(opacity_logit(sigmoid(x)) - x) <= 1e-5);
    }
    CHECK(std::isfinite(opacity_logit(0.0)));
    CHECK(std::isfinite(opacity_logit(1.0)));
}

TEST_CASE("decode_covariance basics") {
    const Eigen::Matrix3d eye =
        decode_covariance({0, 0, 0}, {1, 0, 0, 0});
    CHECK((eye - Eigen::Matrix3d::Identity()).norm() <= 1e-12);

    const float ln2 = static_cast<float>(std::log(2.0));
    const Eigen::Matrix3d stretched = decode_covariance({ln2, 0, 0}, {1, 0, 0, 0});
    Eigen::Matrix3d expected = Eigen::Matrix3d::Identity();
    expected(0, 0) = 4.0;
    CHECK((stretched - expected).norm() <= 1e-6);

    CHECK_THROWS_AS(decode_covariance({0, 0, 0}, {0, 0, 0, 0}), NumericError);
}

TEST_CASE("encode_covariance basics") {
    auto [log_scale, quat] = encode_covariance(Eigen::Matrix3d::Identity());
    for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(log_scale[i]) <= 1e-6f);
    }
    CHECK(quat[0] >= 0.0f); // canonical sign

    Eigen::Matrix3d stretched = Eigen::Matrix3d::Identity();
    stretched(0, 0) = 4.0;
    auto [ls2, q2] = encode_covariance(stretched);
    CHECK(ls2[0] == doctest::Approx(std::log(2.0)).epsilon(1e-6));
    CHECK(std::abs(ls2[1]) <= 1e-6f);
    CHECK(std::abs(ls2[2]) <= 1e-6f);
    CHECK((decode_covariance(ls2, q2) - stretched).norm() <= 1e-6);

    Eigen::Matrix3d indefinite = Eigen::Matrix3d::Identity();
    indefinite(2, 2) = -1.0;
    CHECK_THROWS_WITH_AS(encode_covariance(indefinite), doctest::Contains("not PSD"),
                         NumericError);
}

TEST_CASE("covariance codec round trip on random PSD matrices") {
    Rng rng(99);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const Eigen::Matrix3d cov = random_psd(rng, 1e6);
        auto [log_scale, quat] = encode_covariance(cov);
        const Eigen::Matrix3d back = decode_covariance(log_scale, quat);
        worst = std::max(worst, (back - cov).norm() / cov.norm());
    }
    CHECK(worst <= 1e-4);
}

TEST_CASE("quaternion canonical sign survives the codec") {
    Rng rng(1234);
    for (int trial = 0; trial < 200; ++trial) {
        const Eigen::Matrix3d cov = random_psd(rng, 1e3);
        auto [log_scale, quat] = encode_covariance(cov);
        CHECK(quat[0] >= 0.0f);
        const double norm = std::sqrt(
            static_cast<double>(quat[0]) * quat[0] + static_cast<double>(quat[1]) * quat[1] +
            static_cast<double>(quat[2]) * quat[2] + static_cast<double>(quat[3]) * quat[3]);
        CHECK(norm == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("opacity zero reads back as weight one half") {
    SplatRecord rec;
    rec.opacity_logit = 0.0f;
    const GaussianPrimitive p = record_to_primitive(rec);
    CHECK(p.weight == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p.appearance.has_value());
}

TEST_CASE("write then read reproduces the mixture") {
    const GaussianMixture scene = random_scene(64, 7);
    std::stringstream buf;
    write_splats(buf, scene);
    const GaussianMixture back = read_splats(buf);
    REQUIRE(back.size() == scene.size());
    for (std::size_t i = 0; i < scene.size(); ++i) {
        CHECK((back.components[i].mean - scene.components[i].mean).norm() == 0.0);
        CHECK((back.components[i].covariance - scene.components[i].covariance).norm() <=
              1e-4 * scene.components[i].covariance.norm());
        CHECK(back.components[i].appearance->opacity_logit ==
              scene.components[i].appearance->opacity_logit);
    }
}

TEST_CASE("round trip is byte-identical for untouched fields") {
    const GaussianMixture scene = random_scene(128, 21);
    std::stringstream first;
    write_splats(first, scene);
    const std::string bytes1 = first.str();

    std::stringstream again(bytes1);
    const GaussianMixture back = read_splats(again);
    std::stringstream second;
    write_splats(second, back);
    const std::string bytes2 = second.str();

    REQUIRE(bytes1.size() == bytes2.size());
    const std::size_t header = bytes1.find("end_header\n") + 11;
    REQUIRE(bytes1.substr(0, header) == bytes2.substr(0, header));
    // Fields 0..54 (position, normal, SH, opacity) precede scale/rot in each
    // record and must survive bit-exactly.
    for (std::size_t i = 0; i < scene.size(); ++i) {
        const std::size_t base = header + i * kSplatRecordBytes;
        CHECK(bytes1.compare(base, 55 * 4, bytes2, base, 55 * 4) == 0);
    }
}

TEST_CASE("writing the same mixture twice is deterministic") {
    const GaussianMixture scene = random_scene(32, 3);
    std::stringstream a, b;
    write_splats(a, scene);
    write_splats(b, scene);
    CHECK(a.str() == b.str());
}

TEST_CASE("reader rejects malformed files") {
    const GaussianMixture scene = random_scene(4, 11);
    std::stringstream buf;
    write_splats(buf, scene);
    const std::string bytes = buf.str();

    SUBCASE("ascii encoding") {
        std::stringstream in("ply\nformat ascii 1.0\nelement vertex 0\nend_header\n");
        CHECK_THROWS_WITH_AS(read_splats(in), doctest::Contains("unsupported encoding"),
                             IoError);
    }
    SUBCASE("missing property") {
        const std::size_t cut = bytes.find("property float f_rest_44");
        std::string mutated = bytes;
        mutated.erase(cut, std::string("property float f_rest_44\n").size());
        std::stringstream in(mutated);
        CHECK_THROWS_WITH_AS(read_splats(in), doctest::Contains("schema mismatch"),
                             IoError);
    }
    SUBCASE("reordered property") {
        std::string mutated = bytes;
        const std::size_t pos = mutated.find("property float x");
        mutated.replace(pos, std::string("property float x").size(), "property float y");
        std::stringstream in(mutated);
        CHECK_THROWS_WITH_AS(read_splats(in), doctest::Contains("schema mismatch"),
                             IoError);
    }
    SUBCASE("truncated payload") {
        std::stringstream in(bytes.substr(0, bytes.size() - 17));
        CHECK_THROWS_WITH_AS(read_splats(in), doctest::Contains("unexpected end of stream"),
                             IoError);
    }
    SUBCASE("comments are tolerated") {
        std::string mutated = bytes;
        const std::size_t pos = mutated.find("element vertex");
        mutated.insert(pos, "comment produced by a trainer\n");
        std::stringstream in(mutated);
        CHECK(read_splats(in).size() == 4);
    }
}

TEST_CASE("write requires appearance") {
    GaussianMixture m;
    m.dim = 3;
    GaussianPrimitive p;
    p.mean = Eigen::Vector3d::Zero();
    p.covariance = Eigen::Matrix3d::Identity();
    p.weight = 0.5;
    m.components.push_back(p);
    std::stringstream out;
    CHECK_THROWS_AS(write_splats(out, m), IoError);
}
