#pragma once

#include <stdexcept>
#include <string>

namespace pce {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid analysis or DGP configuration (bad parameter ranges, illegal
/// assumption pairings, unknown JSON keys).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file (bad numeric cell, missing column, bad header).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Structurally well-formed data that violates a dataset invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Estimation cannot proceed (empty subsample, degenerate stratum or
/// mixture weight, single-class response).
class EstimationError : public Error {
 public:
  using Error::Error;
};

/// Arithmetic failure that signals corrupted inputs (negative discriminant
/// beyond tolerance, non-finite iterate after the ridge fallback).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Inputs outside an operation's mathematical domain (outcome out of
/// bounds, nonpositive mean on the ratio scale).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Bootstrap inference failed (too many replicates lost to fit failures).
class InferenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace pce
