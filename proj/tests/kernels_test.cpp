#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "bismarck/rng.hpp"
#include "bismarck/simd/kernels.hpp"

using namespace bismarck;

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t n, double lo = -2.0, double hi = 2.0) {
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform(lo, hi);
    return v;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() &&
           (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

}  // namespace

TEST_CASE("reduction kernels agree across variants to tolerance") {
    const simd::Kernels& ref = simd::scalar_kernels();
    const simd::Kernels* vec = simd::avx2_kernels_or_null();
    if (!vec) return;  // nothing to compare on this host

    Rng rng(7);
    for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 31u, 64u, 65u, 257u}) {
        const auto a = random_vec(rng, n);
        const auto b = random_vec(rng, n);
        const double tol = 1e-12 * (1.0 + static_cast<double>(n));
        CHECK(ref.dot(a.data(), b.data(), n) ==
              doctest::Approx(vec->dot(a.data(), b.data(), n)).epsilon(tol));
        CHECK(ref.sum(a.data(), n) == doctest::Approx(vec->sum(a.data(), n)).epsilon(tol));
        CHECK(ref.sum_sq(a.data(), n) == doctest::Approx(vec->sum_sq(a.data(), n)).epsilon(tol));
        CHECK(ref.sum_abs(a.data(), n) ==
              doctest::Approx(vec->sum_abs(a.data(), n)).epsilon(tol));
    }
}

TEST_CASE("elementwise kernels are bit-identical across variants") {
    const simd::Kernels& ref = simd::scalar_kernels();
    const simd::Kernels* vec = simd::avx2_kernels_or_null();
    if (!vec) return;

    Rng rng(11);
    for (std::size_t n : {0u, 1u, 3u, 4u, 6u, 8u, 13u, 64u, 100u, 255u}) {
        const auto x = random_vec(rng, n);
        const auto y0 = random_vec(rng, n);
        const double c = rng.uniform(-3.0, 3.0);

        auto ya = y0, yb = y0;
        ref.axpy(ya.data(), c, x.data(), n);
        vec->axpy(yb.data(), c, x.data(), n);
        CHECK(bitwise_equal(ya, yb));

        auto sa = y0, sb = y0;
        ref.scale(sa.data(), c, n);
        vec->scale(sb.data(), c, n);
        CHECK(bitwise_equal(sa, sb));

        std::vector<double> ca(n), cb(n);
        ref.scale_copy(ca.data(), c, x.data(), n);
        vec->scale_copy(cb.data(), c, x.data(), n);
        CHECK(bitwise_equal(ca, cb));

        const double c2 = rng.uniform(-3.0, 3.0);
        std::vector<double> ka(n), kb(n);
        ref.combine(ka.data(), c, x.data(), c2, y0.data(), n);
        vec->combine(kb.data(), c, x.data(), c2, y0.data(), n);
        CHECK(bitwise_equal(ka, kb));

        const double t = rng.uniform(0.0, 1.5);
        auto ta = y0, tb = y0;
        ref.soft_threshold(ta.data(), t, n);
        vec->soft_threshold(tb.data(), t, n);
        CHECK(bitwise_equal(ta, tb));
    }
}

TEST_CASE("soft threshold matches the shrinkage definition") {
    const simd::Kernels& k = simd::active();
    std::vector<double> v = {0.5, -0.1, 0.2, -0.9, 0.0};
    k.soft_threshold(v.data(), 0.2, v.size());
    CHECK(v[0] == doctest::Approx(0.3));
    CHECK(v[1] == 0.0);
    CHECK(v[2] == 0.0);
    CHECK(v[3] == doctest::Approx(-0.7));
    CHECK(v[4] == 0.0);
}

TEST_CASE("sparse helpers match their dense equivalents") {
    Rng rng(23);
    const std::size_t d = 40;
    auto w = random_vec(rng, d);
    const std::vector<std::uint32_t> idx = {1, 7, 8, 21, 39};
    const auto val = random_vec(rng, idx.size());

    std::vector<double> dense(d, 0.0);
    for (std::size_t t = 0; t < idx.size(); ++t) dense[idx[t]] = val[t];

    const double sd = simd::sparse_dot(w.data(), idx.data(), val.data(), idx.size());
    double expect = 0.0;
    for (std::size_t i = 0; i < d; ++i) expect += w[i] * dense[i];
    CHECK(sd == doctest::Approx(expect).epsilon(1e-12));

    auto w2 = w;
    simd::sparse_axpy(w2.data(), 0.7, idx.data(), val.data(), idx.size());
    for (std::size_t t = 0; t < idx.size(); ++t) {
        CHECK(w2[idx[t]] == w[idx[t]] + 0.7 * val[t]);
    }
}

TEST_CASE("a kernel table is active") {
    const simd::Kernels& k = simd::active();
    CHECK((std::string(k.name) == "scalar" || std::string(k.name) == "avx2"));
    const double v[3] = {1.0, 2.0, 3.0};
    CHECK(k.sum(v, 3) == doctest::Approx(6.0));
}
