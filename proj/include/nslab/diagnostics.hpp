#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "nslab/data.hpp"
#include "nslab/fields.hpp"
#include "nslab/picard.hpp"

namespace nslab {

// Scalar curvature of one slice from the carried fields and the time derivatives of h and g_{,k}.
// Spatial second derivatives are spectral; the chain rule gives d Gamma.
ScalarGridField scalar_curvature(const SliceFields& fields, const std::vector<ScalarGridField>& dt_h,
                                 const std::vector<ScalarGridField>& dt_dg, double eps_det = 1e-10);

struct CurvatureHistory {
  std::vector<double> times;
  std::vector<ScalarGridField> scalar;
  std::vector<double> sup_outside;  // sup |R| outside the exclusion region, per slice
  std::vector<std::size_t> flagged;  // grid points inside the exclusion region
};

// Time derivatives by differences across slices (2nd order centered, one-sided at the ends).
CurvatureHistory curvature_history(const History& fields, const ExclusionRegion& exclusion = {},
                                   double eps_det = 1e-10);

// Curvature of the data slice, with d_t h from the harmonic system and d_t g_{,k} = d_k h.
ScalarGridField data_slice_curvature(const DataList& data, Prefactor prefactor = Prefactor::g00,
                                     double eps_det = 1e-10);

enum class SingularGeometry { point, hyperplane };

struct BlowupFit {
  std::vector<double> radii;
  std::vector<double> maxima;
  double beta = 0.0;
  double residual = 0.0;  // RMS misfit of log |R|_max
  double shell_ratio = 1.5;
};

inline constexpr double kBlowupNoiseFloor = 1e-10;

// Shell maxima of |R| over dist in [r, shell_ratio r) from the singular set, and their log-log slope.
BlowupFit fit_blowup_exponent(const ScalarGridField& slice, SingularGeometry geometry, const std::vector<double>& radii,
                              double shell_ratio = 1.5, int axis = 0);
std::vector<double> geometric_radii(double r_min, double r_max, int count);

enum class GapConvention { as_written, root_sum_squares };

struct CurveSample {
  int dim = 3;
  std::vector<double> s;
  std::vector<std::array<double, 4>> position;  // (t, x^1, ..., x^n)
  std::vector<std::array<double, 4>> tangent;
  std::vector<std::array<std::array<double, 4>, 4>> frame;  // frame[j][i] is e_i at sample j
};

// Tangents by second-order differences, coordinate-basis frame.
CurveSample make_curve(int dim, std::vector<double> s, std::vector<std::array<double, 4>> position);
void validate(const CurveSample& curve);

double gap_length(const CurveSample& curve, const History& metric_fields,
                  GapConvention convention = GapConvention::as_written);

// Multilinear interpolation of the metric at a space-time point.
PointMetric interpolate_metric(const History& fields, const std::array<double, 4>& position);

struct ConstraintSeries {
  std::vector<double> times;
  std::vector<std::array<double, 4>> sup;  // sup |Gamma^mu| per slice, per mu
  std::vector<double> max;                 // max over mu per slice
  double initial = 0.0;
  double peak = 0.0;
};

ConstraintSeries constraint_monitor(const History& fields, const ExclusionRegion& exclusion = {},
                                    double eps_det = 1e-10);
ConstraintSeries constraint_monitor(const SliceFields& slice, const ExclusionRegion& exclusion = {},
                                    double eps_det = 1e-10);

struct SignatureSeries {
  std::vector<double> times;
  std::vector<double> margin;
  int first_failure = -1;
};

SignatureSeries signature_monitor(const History& fields);

}  // namespace nslab
