#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "itr/core/random.hpp"
#include "itr/kernels/kernels.hpp"

using namespace itr;
using namespace itr::kernels;

namespace {

std::vector<double> randoms(Rng& r, std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (auto& x : v) x = lo + (hi - lo) * r.uniform();
    return v;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("AVX2 kernels reproduce the scalar reference") {
    if (!avx2_available()) {
        MESSAGE("AVX2 not available; only the scalar table is exercised");
    }
    const Table& s = scalar_table();
    const Table& v = avx2_table();
    Rng r(5);
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 9u, 31u, 1000u, 1027u}) {
        CAPTURE(n);
        const auto a = randoms(r, n, -3, 3), b = randoms(r, n, -3, 3), c = randoms(r, n, -3, 3);

        std::vector<double> o1(n), o2(n);
        s.partial_residual(a.data(), b.data(), c.data(), o1.data(), n);
        v.partial_residual(a.data(), b.data(), c.data(), o2.data(), n);
        CHECK(same_bits(o1, o2));

        o1 = a;
        o2 = a;
        s.apply_delta(o1.data(), b.data(), c.data(), n);
        v.apply_delta(o2.data(), b.data(), c.data(), n);
        CHECK(same_bits(o1, o2));

        o1 = a;
        o2 = a;
        s.axpy(0.37, b.data(), o1.data(), n);
        v.axpy(0.37, b.data(), o2.data(), n);
        CHECK(same_bits(o1, o2));

        const auto p1 = randoms(r, n, 0, 1), p0 = randoms(r, n, 0, 1);
        for (double rho : {-0.3, 0.0, 0.6}) {
            std::vector<double> q[8];
            for (auto& x : q) x.resize(n);
            s.joint_po(p1.data(), p0.data(), rho, q[0].data(), q[1].data(), q[2].data(), q[3].data(), n);
            v.joint_po(p1.data(), p0.data(), rho, q[4].data(), q[5].data(), q[6].data(), q[7].data(), n);
            for (int k = 0; k < 4; ++k) CHECK(same_bits(q[k], q[k + 4]));

            const double l[4] = {1.0, 0.0, 1.25, 0.25};
            s.expected_loss(q[3].data(), q[2].data(), q[1].data(), q[0].data(), l, o1.data(), n);
            v.expected_loss(q[3].data(), q[2].data(), q[1].data(), q[0].data(), l, o2.data(), n);
            CHECK(same_bits(o1, o2));
        }

        std::vector<double> k1(n, 2.0), k2(n, 2.0);
        s.count_less(a.data(), b.data(), k1.data(), n);
        v.count_less(a.data(), b.data(), k2.data(), n);
        CHECK(same_bits(k1, k2));

        double mag = 0.0;
        for (std::size_t i = 0; i < n; ++i) mag += std::abs(a[i]) * (1.0 + std::abs(b[i]));
        CHECK(std::abs(v.dot(a.data(), b.data(), n) - s.dot(a.data(), b.data(), n)) <= 1e-14 * mag);
        CHECK(std::abs(v.sum(a.data(), n) - s.sum(a.data(), n)) <= 1e-14 * mag);
    }
}

TEST_CASE("table lookup and names") {
    CHECK(table(Isa::scalar).isa == Isa::scalar);
    CHECK(isa_name(Isa::avx2) == "avx2");
    CHECK((active().isa == Isa::scalar || avx2_available()));
}
