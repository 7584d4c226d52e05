#include <gtest/gtest.h>

#include <random>
#include <set>
#include <sstream>

#include "latlab/matgroups.hpp"
#include "latlab/oracle/oracles.hpp"

using namespace latlab;

namespace {

IntMatrix random_word(std::mt19937_64& rng, Ambient a, int max_len, std::vector<int>* letters = nullptr) {
  auto gens = standard_generators(a);
  std::vector<IntMatrix> all = gens;
  for (const auto& g : gens) all.push_back(g.inverse());
  std::uniform_int_distribution<int> len(0, max_len), pick(0, static_cast<int>(all.size()) - 1);
  IntMatrix w = IntMatrix::identity(dimension(a));
  for (int i = 0, n = len(rng); i < n; ++i) {
    int k = pick(rng);
    if (letters) letters->push_back(k);
    w = w * all[static_cast<std::size_t>(k)];
  }
  return w;
}

// Order of the subgroup pattern mod N inside SL_n(Z/N), by exhaustive enumeration.
std::uint64_t subgroup_order_mod(const SubgroupSpec& spec) {
  const int n = spec.dim();
  const std::int64_t N = spec.level;
  std::uint64_t total = 1;
  for (int i = 0; i < n * n; ++i) total *= static_cast<std::uint64_t>(N);
  std::uint64_t count = 0;
  std::array<std::int64_t, 9> e{};
  for (std::uint64_t code = 0; code < total; ++code) {
    std::uint64_t c = code;
    for (int i = 0; i < n * n; ++i) {
      e[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(c % static_cast<std::uint64_t>(N));
      c /= static_cast<std::uint64_t>(N);
    }
    std::int64_t det = n == 2 ? e[0] * e[3] - e[1] * e[2]
                              : e[0] * (e[4] * e[8] - e[5] * e[7]) - e[1] * (e[3] * e[8] - e[5] * e[6]) +
                                    e[2] * (e[3] * e[7] - e[4] * e[6]);
    if (floor_mod(det, N) != floor_mod(1, N)) continue;
    bool ok = true;
    for (const auto& [i, j, t] : spec.pattern()) ok &= floor_mod(e[static_cast<std::size_t>(i * n + j)] - t, N) == 0;
    count += ok;
  }
  return count;
}

}  // namespace

TEST(IntMatrix, RejectsDeterminantOtherThanOne) {
  EXPECT_THROW((IntMatrix{{2, 0}, {0, 1}}), InputError);
  EXPECT_NO_THROW((IntMatrix{{2, 1}, {1, 1}}));
}

TEST(IntMatrix, InverseIsExact) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    for (Ambient a : {Ambient::sl2, Ambient::sl3}) {
      auto g = random_word(rng, a, 20);
      EXPECT_EQ(g * g.inverse(), IntMatrix::identity(dimension(a)));
      EXPECT_EQ(g.inverse() * g, IntMatrix::identity(dimension(a)));
    }
  }
}

TEST(IntMatrix, PromotesBeyondSixtyFourBits) {
  IntMatrix t{{1, 1000000007}, {0, 1}};
  IntMatrix u{{1, 0}, {1000000009, 1}};
  IntMatrix g = t * u;
  for (int i = 0; i < 3; ++i) g = g * g;  // entries near 10^{150}
  EXPECT_FALSE(g.max_abs().is_small());
  EXPECT_EQ(g.det(), Integer(1));
  EXPECT_EQ(g * g.inverse(), IntMatrix::identity(2));
  auto h = g * t;
  EXPECT_EQ((g * t) * u, g * (t * u));
  EXPECT_EQ(h * t.inverse(), g);
}

TEST(IntMatrix, MultiplicationIsAssociative) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    auto a = random_word(rng, Ambient::sl3, 10), b = random_word(rng, Ambient::sl3, 10), c = random_word(rng, Ambient::sl3, 10);
    EXPECT_EQ((a * b) * c, a * (b * c));
  }
}

TEST(ReduceMod, Examples) {
  EXPECT_TRUE(reduce_mod(IntMatrix{{3, 2}, {4, 3}}, 2).is_identity());
  EXPECT_TRUE(reduce_mod(IntMatrix{{1, 5}, {0, 1}}, 5).is_identity());
  auto r = reduce_mod(IntMatrix{{2, 1}, {1, 1}}, 3);
  EXPECT_EQ(r, ModMatrix(2, 3, {2, 1, 1, 1}));
  auto neg = reduce_mod(IntMatrix{{-1, 0}, {0, -1}}, 7);
  EXPECT_EQ(neg, ModMatrix(2, 7, {6, 0, 0, 6}));
}

TEST(ReduceMod, IsAHomomorphism) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 300; ++i)
    for (std::int64_t N : {2, 3, 7, 12}) {
      auto a = random_word(rng, Ambient::sl2, 15), b = random_word(rng, Ambient::sl2, 15);
      EXPECT_EQ(reduce_mod(a * b, N), reduce_mod(a, N) * reduce_mod(b, N));
      auto c = random_word(rng, Ambient::sl3, 8), d = random_word(rng, Ambient::sl3, 8);
      EXPECT_EQ(reduce_mod(c * d, N), reduce_mod(c, N) * reduce_mod(d, N));
    }
}

TEST(ModMatrix, KeyRoundTrip) {
  ModMatrix m(3, 5, {1, 2, 0, 0, 1, 3, 0, 0, 1});
  EXPECT_EQ(ModMatrix::from_key(3, 5, m.key()), m);
  EXPECT_THROW(ModMatrix(2, 5, {2, 0, 0, 1}), InputError);
}

TEST(SubgroupContains, Examples) {
  EXPECT_TRUE(subgroup_contains(SubgroupSpec::principal(2), IntMatrix{{3, 2}, {4, 3}}));
  EXPECT_FALSE(subgroup_contains(SubgroupSpec::principal(2), IntMatrix{{1, 1}, {0, 1}}));
  EXPECT_TRUE(subgroup_contains(SubgroupSpec::gamma0(3), IntMatrix{{1, 0}, {3, 1}}));
  EXPECT_FALSE(subgroup_contains(SubgroupSpec::gamma0(3), IntMatrix{{1, 0}, {1, 1}}));
  EXPECT_TRUE(subgroup_contains(SubgroupSpec::principal(1), IntMatrix{{2, 1}, {1, 1}}));
}

TEST(SubgroupContains, Gamma2InSl3) {
  auto spec = SubgroupSpec::gamma2(4);
  EXPECT_TRUE(subgroup_contains(spec, IntMatrix{{1, 5, 7}, {0, 1, 3}, {0, 0, 1}}));
  EXPECT_TRUE(subgroup_contains(spec, IntMatrix{{1, 0, 0}, {4, 1, 0}, {8, -4, 1}}));
  EXPECT_FALSE(subgroup_contains(spec, IntMatrix{{1, 0, 0}, {0, 1, 0}, {0, 1, 1}}));
  EXPECT_THROW(SubgroupSpec::make(Ambient::sl2, SubgroupKind::gamma2, 3), InputError);
  EXPECT_THROW(SubgroupSpec::principal(0), InputError);
}

TEST(SubgroupContains, DimensionMismatchIsInputError) {
  EXPECT_THROW(subgroup_contains(SubgroupSpec::principal(2), IntMatrix::identity(3)), InputError);
}

TEST(SubgroupContains, MatchesReductionOnRandomWords) {
  std::mt19937_64 rng(17);
  const IntMatrix T{{1, 1}, {0, 1}}, S{{0, -1}, {1, 0}};
  for (std::int64_t N = 1; N <= 8; ++N) {
    auto spec = SubgroupSpec::principal(N);
    int inside = 0;
    for (int i = 0; i < 400; ++i) {
      auto w = random_word(rng, Ambient::sl2, 20);
      if (i % 4 == 0) {
        // Conjugates of T^N land in Gamma(N); mix them in so both answers occur.
        IntMatrix tn = IntMatrix::identity(2);
        for (int k = 0; k < N; ++k) tn = tn * T;
        w = w * tn * w.inverse();
      }
      bool in = subgroup_contains(spec, w);
      inside += in;
      EXPECT_EQ(in, reduce_mod(w, N).is_identity()) << w.str();
    }
    EXPECT_GT(inside, 0);
    (void)S;
  }
}

TEST(EnumerateQuotient, TrivialGroup) { EXPECT_EQ(enumerate_quotient(SubgroupSpec::principal(1)).index(), 1u); }

TEST(EnumerateQuotient, PrincipalFiveHasIndex120) {
  auto q = enumerate_quotient(SubgroupSpec::principal(5));
  EXPECT_EQ(q.index(), 120u);
  EXPECT_EQ(q.index(), oracle::count_sl_mod(2, 5));
}

TEST(EnumerateQuotient, Gamma0FiveIsTheProjectiveLine) {
  auto q = enumerate_quotient(SubgroupSpec::gamma0(5));
  EXPECT_EQ(q.index(), 6u);
  EXPECT_EQ(q.index(), oracle::projective_line(5).size());
  EXPECT_TRUE(q.projective_labels());
}

TEST(EnumerateQuotient, PrincipalIndexMatchesBruteForceForLevelsUpToEight) {
  for (std::int64_t N = 1; N <= 8; ++N)
    EXPECT_EQ(enumerate_quotient(SubgroupSpec::principal(N)).index(), oracle::count_sl_mod(2, N)) << "N=" << N;
}

TEST(EnumerateQuotient, IndicesMatchOrderRatios) {
  std::vector<SubgroupSpec> specs{SubgroupSpec::gamma0(4),  SubgroupSpec::gamma0(6),
                                  SubgroupSpec::gamma0(9),  SubgroupSpec::principal(2, Ambient::sl3),
                                  SubgroupSpec::principal(3, Ambient::sl3), SubgroupSpec::gamma0(2, Ambient::sl3),
                                  SubgroupSpec::gamma0(3, Ambient::sl3),    SubgroupSpec::gamma2(2),
                                  SubgroupSpec::gamma2(3)};
  for (const auto& spec : specs) {
    auto q = enumerate_quotient(spec);
    auto full = oracle::count_sl_mod(spec.dim(), spec.level);
    EXPECT_EQ(q.index() * subgroup_order_mod(spec), full) << spec.name();
  }
}

TEST(EnumerateQuotient, CapRaisesResourceError) {
  EXPECT_THROW(enumerate_quotient(SubgroupSpec::principal(5), 100), ResourceError);
  EXPECT_NO_THROW(enumerate_quotient(SubgroupSpec::principal(5), 120));
}

TEST(QuotientSpace, ActionRowsArePermutations) {
  for (const auto& spec : {SubgroupSpec::principal(6), SubgroupSpec::gamma0(10), SubgroupSpec::gamma2(2)}) {
    auto q = enumerate_quotient(spec);
    for (std::size_t g = 0; g < q.generator_count(); ++g) {
      std::set<std::uint32_t> image;
      for (std::uint32_t c = 0; c < q.index(); ++c) image.insert(q.image(c, g));
      EXPECT_EQ(image.size(), q.index()) << spec.name();
    }
  }
}

TEST(QuotientSpace, TableCompositionMatchesReduction) {
  std::mt19937_64 rng(23);
  for (const auto& spec : {SubgroupSpec::principal(7), SubgroupSpec::gamma0(12), SubgroupSpec::gamma0(3, Ambient::sl3)}) {
    auto q = enumerate_quotient(spec);
    auto gens = q.generators();
    const auto k = gens.size();
    for (int trial = 0; trial < 1000; ++trial) {
      auto base = random_word(rng, spec.ambient, 12);
      std::vector<int> letters;
      auto w = random_word(rng, spec.ambient, 12, &letters);
      std::uint32_t c = q.coset_of(base);
      for (int l : letters) {
        auto gi = static_cast<std::size_t>(l);
        if (gi < k) {
          c = q.image(c, gi);
        } else {
          // Inverse letter: find the preimage under the generator.
          for (std::uint32_t x = 0; x < q.index(); ++x)
            if (q.image(x, gi - k) == c) {
              c = x;
              break;
            }
        }
      }
      EXPECT_EQ(c, q.coset_of(base * w));
      if (trial > 300) break;  // the preimage search is linear; keep the runtime modest
    }
  }
}

TEST(QuotientSpace, RightActionLaw) {
  std::mt19937_64 rng(29);
  auto q = enumerate_quotient(SubgroupSpec::gamma0(11));
  for (int trial = 0; trial < 200; ++trial) {
    auto g = random_word(rng, Ambient::sl2, 15), h = random_word(rng, Ambient::sl2, 15);
    auto pg = q.permutation(g), ph = q.permutation(h), pgh = q.permutation(g * h);
    for (std::uint32_t x = 0; x < q.index(); ++x) EXPECT_EQ(pgh[x], ph[pg[x]]);
  }
}

TEST(QuotientSpace, CosetsFollowTheSubgroup) {
  // x and y share a coset exactly when x y^{-1} lies in the subgroup.
  std::mt19937_64 rng(31);
  auto spec = SubgroupSpec::gamma0(9);
  auto q = enumerate_quotient(spec);
  for (int trial = 0; trial < 500; ++trial) {
    auto x = random_word(rng, Ambient::sl2, 10), y = random_word(rng, Ambient::sl2, 10);
    EXPECT_EQ(q.coset_of(x) == q.coset_of(y), subgroup_contains(spec, x * y.inverse()));
  }
}

TEST(QuotientSpace, CanonicalLabelsAreLexMinimal) {
  auto q = enumerate_quotient(SubgroupSpec::principal(3));
  EXPECT_EQ(q.label(0), (std::vector<std::int64_t>{1, 0, 0, 1}));
  auto g = enumerate_quotient(SubgroupSpec::gamma0(5));
  std::set<std::vector<std::int64_t>> labels;
  for (std::uint32_t c = 0; c < g.index(); ++c) labels.insert(g.label(c));
  EXPECT_EQ(labels.size(), 6u);
  std::set<std::vector<std::int64_t>> expected;
  for (auto [x, y] : oracle::projective_line(5)) expected.insert({x, y});
  EXPECT_EQ(labels, expected);
}

TEST(QuotientSpace, CsvExport) {
  auto q = enumerate_quotient(SubgroupSpec::gamma0(5));
  std::ostringstream os;
  q.write_csv(os);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "coset_id,generator_id,image_coset_id");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 12);
}
