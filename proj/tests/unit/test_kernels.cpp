#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "hilsim/field_kernels.hpp"

using namespace hilsim;
using kernels::Isa;

namespace {

const magnetics::HelmholtzPair kPair{0.8404, 0.4576, 24, 2.94};

struct Cloud {
  std::vector<double> x, y, z;
  explicit Cloud(std::size_t n, std::uint64_t seed, double half = 0.6) : x(n), y(n), z(n) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-half, half);
    for (std::size_t i = 0; i < n; ++i) x[i] = u(rng), y[i] = u(rng), z[i] = u(rng);
  }
  kernels::PointBlock block() const { return {x, y, z}; }
};

struct Out {
  std::vector<double> bx, by, bz;
  explicit Out(std::size_t n) : bx(n), by(n), bz(n) {}
  kernels::FieldBlock block() { return {bx, by, bz}; }
};

}  // namespace

TEST(Kernels, ScalarMatchesPerPointApi) {
  const Cloud c(257, 1);
  Out o(c.x.size());
  ASSERT_EQ(kernels::pair_field_batch(kPair, c.block(), o.block(), Isa::Scalar), kernels::kNoWireHit);
  for (std::size_t i = 0; i < c.x.size(); ++i) {
    const auto b = magnetics::pair_field(kPair, {c.x[i], c.y[i], c.z[i]});
    EXPECT_EQ(o.bx[i], b.bx);
    EXPECT_EQ(o.by[i], b.by);
    EXPECT_EQ(o.bz[i], b.bz);
  }
}

TEST(Kernels, Avx2BitExactAgainstScalar) {
  if (!kernels::isa_available(Isa::Avx2)) GTEST_SKIP() << "AVX2 kernel not available";
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 9u, 1000u, 4099u}) {
    const Cloud c(n, 100 + n);
    Out s(n), v(n);
    ASSERT_EQ(kernels::pair_field_batch(kPair, c.block(), s.block(), Isa::Scalar), kernels::kNoWireHit);
    ASSERT_EQ(kernels::pair_field_batch(kPair, c.block(), v.block(), Isa::Avx2), kernels::kNoWireHit);
    for (std::size_t i = 0; i < n; ++i) {
      ASSERT_EQ(s.bx[i], v.bx[i]) << "n=" << n << " i=" << i;
      ASSERT_EQ(s.by[i], v.by[i]) << "n=" << n << " i=" << i;
      ASSERT_EQ(s.bz[i], v.bz[i]) << "n=" << n << " i=" << i;
    }
  }
}

TEST(Kernels, WireHitIndexAgrees) {
  for (std::size_t hit : {0u, 2u, 5u, 8u, 10u}) {
    Cloud c(11, 7, 0.1);
    c.x[hit] = 0.4202, c.y[hit] = 0.0, c.z[hit] = 0.2288;  // on the upper +x side
    Out s(11), v(11);
    EXPECT_EQ(kernels::pair_field_batch(kPair, c.block(), s.block(), Isa::Scalar), hit);
    if (kernels::isa_available(Isa::Avx2))
      EXPECT_EQ(kernels::pair_field_batch(kPair, c.block(), v.block(), Isa::Avx2), hit);
  }
}

TEST(Kernels, DispatchAndNames) {
  EXPECT_TRUE(kernels::isa_available(Isa::Scalar));
  EXPECT_TRUE(kernels::isa_available(kernels::detect_isa()));
  EXPECT_STREQ(kernels::isa_name(Isa::Scalar), "scalar");
  EXPECT_STREQ(kernels::isa_name(Isa::Avx2), "avx2");
}

TEST(Kernels, MismatchedBlocksThrow) {
  const Cloud c(4, 2);
  Out o(3);
  EXPECT_THROW(kernels::pair_field_batch(kPair, c.block(), o.block(), Isa::Scalar), std::invalid_argument);
}
