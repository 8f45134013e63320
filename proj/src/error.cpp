#include "nslab/error.hpp"

#include <sstream>

namespace nslab {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::configuration: return "configuration";
    case ErrorKind::validation: return "validation";
    case ErrorKind::shape: return "shape";
    case ErrorKind::stencil: return "stencil";
    case ErrorKind::history: return "history";
    case ErrorKind::undefined_point: return "undefined-point";
    case ErrorKind::degenerate_metric: return "degenerate-metric";
    case ErrorKind::rejected_data: return "rejected-data";
    case ErrorKind::gate: return "gate";
    case ErrorKind::contraction_failure: return "contraction-failure";
    case ErrorKind::signature_loss: return "signature-loss";
    case ErrorKind::divergence: return "divergence";
    case ErrorKind::fit: return "fit";
    case ErrorKind::domain: return "domain";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::contraction_failure: return 3;
    case ErrorKind::signature_loss:
    case ErrorKind::degenerate_metric: return 4;
    case ErrorKind::io: return 5;
    default: return 2;
  }
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + " error: " + what), kind_(kind) {}

namespace {
std::string degenerate_message(double det, std::size_t point) {
  std::ostringstream os;
  os << "metric determinant " << det << " at grid point " << point;
  return os.str();
}
}  // namespace

DegenerateMetricError::DegenerateMetricError(double det, std::size_t point)
    : Error(ErrorKind::degenerate_metric, degenerate_message(det, point)), det_(det), point_(point) {}

SignatureLossError::SignatureLossError(int slice, std::size_t point, const std::string& detail)
    : Error(ErrorKind::signature_loss,
            "slice " + std::to_string(slice) + ", grid point " + std::to_string(point) + ": " + detail),
      slice_(slice),
      point_(point) {}

RejectedDataError::RejectedDataError(double margin, const std::string& detail)
    : Error(ErrorKind::rejected_data, detail + " (achieved margin " + std::to_string(margin) + ")"),
      margin_(margin) {}

ContractionFailure::ContractionFailure(std::vector<double> ratios, const std::string& detail)
    : Error(ErrorKind::contraction_failure, detail), ratios_(std::move(ratios)) {}

}  // namespace nslab
