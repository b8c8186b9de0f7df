#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

namespace ivpile {

enum class OutcomeKind { Binary, BoundedContinuous };

/// Immutable after construction; rows of (X, Z, A, Y) with Z, A in {-1,+1}.
struct ObservationTable {
  Eigen::MatrixXd x;   // n x d covariates
  Eigen::VectorXd z;   // instrument, +/-1
  Eigen::VectorXd a;   // treatment, +/-1
  Eigen::VectorXd y;   // outcome
  OutcomeKind outcome_kind = OutcomeKind::Binary;
  double k0 = -1.0;    // outcome bounds when BoundedContinuous
  double k1 = 1.0;

  Eigen::Index n() const { return x.rows(); }
  Eigen::Index dim() const { return x.cols(); }

  /// Throws std::invalid_argument on any invariant violation.
  void validate() const;

  ObservationTable subset(const std::vector<Eigen::Index>& rows) const;
};

struct CsvSchema {
  std::vector<std::string> x_cols;  // empty = every column not otherwise mapped
  std::string z_col = "z";
  std::string a_col = "a";
  std::string y_col = "y";
  bool remap_zero_one = false;  // remap {0,1} codes for z and a to {-1,+1}
};

ObservationTable load_csv(const std::string& path, const CsvSchema& schema,
                          OutcomeKind outcome_kind, double k0 = -1.0,
                          double k1 = 1.0);

/// Writes x1..xd,z,a,y with 17 significant digits (exact double round-trip).
void save_csv(const std::string& path, const ObservationTable& table);

struct SplitResult {
  ObservationTable train;
  ObservationTable test;
};

SplitResult split(const ObservationTable& table, double test_fraction,
                  std::uint64_t seed);

struct FoldAssignment {
  Eigen::VectorXi fold_of;  // n entries in [0, k)
  int k = 0;

  std::vector<Eigen::Index> fold_rows(int fold) const;
  std::vector<Eigen::Index> out_of_fold_rows(int fold) const;
};

FoldAssignment make_folds(const ObservationTable& table, int k,
                          std::uint64_t seed);

}  // namespace ivpile
