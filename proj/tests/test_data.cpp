#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <set>

#include "ivpile/data.hpp"
#include "ivpile/rng.hpp"

using namespace ivpile;

namespace {

ObservationTable random_table(Eigen::Index n, Eigen::Index d,
                              std::uint64_t seed) {
  Rng rng(seed);
  ObservationTable t;
  t.x.resize(n, d);
  t.z.resize(n);
  t.a.resize(n);
  t.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) t.x(i, j) = rng.uniform(-5.0, 5.0);
    t.z[i] = rng.bernoulli(0.5) ? 1.0 : -1.0;
    t.a[i] = rng.bernoulli(0.5) ? 1.0 : -1.0;
    t.y[i] = rng.bernoulli(0.5) ? 1.0 : -1.0;
  }
  return t;
}

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path("/tmp/ivpile_test_" + name) {}
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("csv round-trip preserves every double bit-exactly") {
  ObservationTable t = random_table(57, 4, 11);
  t.x(0, 0) = 0x1.fffffffffffffp-3;  // awkward mantissa
  TempFile f("roundtrip.csv");
  save_csv(f.path, t);
  const ObservationTable back = load_csv(f.path, {}, OutcomeKind::Binary);
  REQUIRE(back.n() == t.n());
  REQUIRE(back.dim() == t.dim());
  CHECK(back.x.cwiseEqual(t.x).all());
  CHECK(back.z.cwiseEqual(t.z).all());
  CHECK(back.a.cwiseEqual(t.a).all());
  CHECK(back.y.cwiseEqual(t.y).all());
}

TEST_CASE("csv loader maps columns by header name, not position") {
  TempFile f("shuffled.csv");
  {
    std::ofstream out(f.path);
    out << "y,x2,z,x1,a\n";
    out << "1,0.5,-1,0.25,1\n";
    out << "-1,1.5,1,-0.75,-1\n";
  }
  const ObservationTable t = load_csv(f.path, {}, OutcomeKind::Binary);
  REQUIRE(t.n() == 2);
  REQUIRE(t.dim() == 2);
  // x columns keep file order: x2 first, then x1
  CHECK(t.x(0, 0) == 0.5);
  CHECK(t.x(0, 1) == 0.25);
  CHECK(t.z[0] == -1.0);
  CHECK(t.a[1] == -1.0);
  CHECK(t.y[1] == -1.0);

  CsvSchema named;
  named.x_cols = {"x1"};
  const ObservationTable only_x1 = load_csv(f.path, named, OutcomeKind::Binary);
  REQUIRE(only_x1.dim() == 1);
  CHECK(only_x1.x(1, 0) == -0.75);
}

TEST_CASE("csv loader remaps {0,1} instrument and treatment codes on request") {
  TempFile f("zeroone.csv");
  {
    std::ofstream out(f.path);
    out << "x1,z,a,y\n0.1,0,1,1\n0.2,1,0,-1\n";
  }
  CsvSchema schema;
  schema.remap_zero_one = true;
  const ObservationTable t = load_csv(f.path, schema, OutcomeKind::Binary);
  CHECK(t.z[0] == -1.0);
  CHECK(t.z[1] == 1.0);
  CHECK(t.a[1] == -1.0);
}

TEST_CASE("csv parse errors name the offending row and column") {
  TempFile f("bad.csv");
  {
    std::ofstream out(f.path);
    out << "x1,z,a,y\n0.1,-1,1,1\noops,-1,1,1\n";
  }
  CHECK_THROWS_WITH_AS(load_csv(f.path, {}, OutcomeKind::Binary),
                       doctest::Contains("row 2"), std::runtime_error);
  CHECK_THROWS_WITH_AS(load_csv(f.path, {}, OutcomeKind::Binary),
                       doctest::Contains("x1"), std::runtime_error);
}

TEST_CASE("csv loader rejects out-of-domain instrument codes") {
  TempFile f("domain.csv");
  {
    std::ofstream out(f.path);
    out << "x1,z,a,y\n0.1,2,1,1\n";
  }
  CHECK_THROWS_WITH_AS(load_csv(f.path, {}, OutcomeKind::Binary),
                       doctest::Contains("z must be -1 or +1"),
                       std::runtime_error);
}

TEST_CASE("validate rejects malformed tables") {
  ObservationTable t = random_table(5, 2, 3);
  CHECK_NOTHROW(t.validate());

  ObservationTable bad_z = t;
  bad_z.z[2] = 0.0;
  CHECK_THROWS_AS(bad_z.validate(), std::invalid_argument);

  ObservationTable bad_y = t;
  bad_y.y[0] = 0.5;
  CHECK_THROWS_AS(bad_y.validate(), std::invalid_argument);

  ObservationTable cont = t;
  cont.outcome_kind = OutcomeKind::BoundedContinuous;
  cont.k0 = -2.0;
  cont.k1 = 2.0;
  cont.y[0] = 1.7;
  CHECK_NOTHROW(cont.validate());
  cont.y[0] = 2.5;
  CHECK_THROWS_AS(cont.validate(), std::invalid_argument);
  cont.y[0] = 1.7;
  cont.k1 = cont.k0;
  CHECK_THROWS_AS(cont.validate(), std::invalid_argument);
}

TEST_CASE("split on 301 rows yields a 150/151 partition of the rows") {
  const ObservationTable t = random_table(301, 3, 21);
  const SplitResult s = split(t, 0.5, 99);
  CHECK(s.train.n() + s.test.n() == 301);
  CHECK(std::min(s.train.n(), s.test.n()) == 150);
  CHECK(std::max(s.train.n(), s.test.n()) == 151);

  // the two parts partition the multiset of y-values and x sums
  CHECK(s.train.y.sum() + s.test.y.sum() == doctest::Approx(t.y.sum()));
  CHECK(s.train.x.sum() + s.test.x.sum() == doctest::Approx(t.x.sum()));

  const SplitResult again = split(t, 0.5, 99);
  REQUIRE(again.train.n() == s.train.n());
  CHECK(again.train.x.cwiseEqual(s.train.x).all());
  const SplitResult other = split(t, 0.5, 100);
  CHECK((other.train.n() != s.train.n() ||
         !other.train.x.cwiseEqual(s.train.x).all()));
}

TEST_CASE("folds are balanced, exhaustive, and complementary") {
  const ObservationTable t = random_table(103, 2, 5);
  const FoldAssignment folds = make_folds(t, 5, 7);
  std::set<Eigen::Index> seen;
  for (int f = 0; f < 5; ++f) {
    const auto in = folds.fold_rows(f);
    const auto out = folds.out_of_fold_rows(f);
    CHECK(static_cast<Eigen::Index>(in.size() + out.size()) == t.n());
    CHECK(in.size() >= 20);
    CHECK(in.size() <= 21);
    for (auto r : in) {
      CHECK(seen.insert(r).second);  // no row in two folds
    }
  }
  CHECK(seen.size() == 103);

  const FoldAssignment same = make_folds(t, 5, 7);
  CHECK(same.fold_of.cwiseEqual(folds.fold_of).all());
}

TEST_CASE("subset keeps rows in the requested order with metadata") {
  ObservationTable t = random_table(10, 2, 13);
  t.outcome_kind = OutcomeKind::BoundedContinuous;
  t.k0 = -4.0;
  t.k1 = 4.0;
  const ObservationTable s = t.subset({7, 2, 2});
  REQUIRE(s.n() == 3);
  CHECK(s.x.row(0).cwiseEqual(t.x.row(7)).all());
  CHECK(s.x.row(1).cwiseEqual(t.x.row(2)).all());
  CHECK(s.x.row(2).cwiseEqual(t.x.row(2)).all());
  CHECK(s.y[0] == t.y[7]);
  CHECK(s.k0 == -4.0);
  CHECK(s.outcome_kind == OutcomeKind::BoundedContinuous);
}
