#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pce {

/// One study participant: covariates x, assignment z, compliance type c
/// (observed only when z = 1), response indicator r, and outcome y
/// (observed only when r = 1).
struct UnitRecord {
  std::vector<double> x;
  int z = 0;
  std::optional<int> c;
  int r = 0;
  std::optional<double> y;
};

/// Immutable-after-construction sample with outcome bounds (l, h).
/// Safe to share across concurrent readers.
struct Dataset {
  std::vector<UnitRecord> records;
  std::vector<std::string> covariate_names;
  std::pair<double, double> outcome_bounds{0.0, 1.0};

  std::size_t size() const { return records.size(); }

  /// Throws ValidationError on any violated invariant:
  /// c present iff z=1; y present iff r=1; finite covariates of uniform
  /// dimension; y within bounds; both arms nonempty; both compliance types
  /// present in the treatment arm; at least one responder per arm.
  void validate() const;
};

/// Reads the CSV schema `z,c,r,y,<cov1>,...,<covp>` (empty cell = absent
/// c or y) and returns a validated Dataset with row order preserved.
/// Throws ParseError (with row/column) or ValidationError.
Dataset load_csv(const std::string& path, std::pair<double, double> bounds);

/// Writes the same CSV schema with 17 significant digits, so a
/// load -> write -> load round trip reproduces every value bit-exactly.
void write_csv(const Dataset& d, const std::string& path);

/// Non-fatal data-quality warnings: response rate below 10% in either arm,
/// compliance-type share below 5% in the treatment arm. Pure.
std::vector<std::string> validate_dataset(const Dataset& d);

}  // namespace pce
