#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace nslab {

enum class ErrorKind {
  configuration,
  validation,
  shape,
  stencil,
  history,
  undefined_point,
  degenerate_metric,
  rejected_data,
  gate,
  contraction_failure,
  signature_loss,
  divergence,
  fit,
  domain,
  io,
};

const char* to_string(ErrorKind kind);

// Process exit code for an error kind: 2 validation, 3 contraction, 4 signature, 5 I/O.
int exit_code(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class DegenerateMetricError : public Error {
 public:
  DegenerateMetricError(double det, std::size_t point);
  double det() const noexcept { return det_; }
  std::size_t point() const noexcept { return point_; }

 private:
  double det_;
  std::size_t point_;
};

class SignatureLossError : public Error {
 public:
  SignatureLossError(int slice, std::size_t point, const std::string& detail);
  int slice() const noexcept { return slice_; }
  std::size_t point() const noexcept { return point_; }

 private:
  int slice_;
  std::size_t point_;
};

class RejectedDataError : public Error {
 public:
  RejectedDataError(double margin, const std::string& detail);
  double margin() const noexcept { return margin_; }

 private:
  double margin_;
};

class ContractionFailure : public Error {
 public:
  ContractionFailure(std::vector<double> ratios, const std::string& detail);
  const std::vector<double>& ratios() const noexcept { return ratios_; }

 private:
  std::vector<double> ratios_;
};

}  // namespace nslab
