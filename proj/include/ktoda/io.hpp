#pragma once

// File formats.  Complex numbers are [re, im] pairs in JSON and re/im column
// pairs in CSV; CSV doubles are printed with 17 significant digits.

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "ktoda/core_types.hpp"
#include "ktoda/lax_dynamics.hpp"
#include "ktoda/moments.hpp"
#include "ktoda/polynomials.hpp"
#include "ktoda/resolvent.hpp"
#include "ktoda/verify_harness.hpp"

namespace ktoda::io {

using Json = nlohmann::json;

std::string format_double(double x);

Json to_json(Complex z);
/// Throws InvalidArgument mentioning `field` unless j is [re, im].
Complex complex_from_json(const Json& j, const std::string& field);

/// {"a": [[re, im], ...], "b": ..., "c": ..., "t": t}
Json state_to_json(const LatticeState& s);
/// Accepts the layout of state_to_json; "t" is optional.
LatticeState state_from_json(const Json& j);

/// Header t, then re/im of a_1..a_m, b_1..b_{m-1}, c_1..c_{m-2}, q1, q2, q3.
std::string trajectory_csv(const Trajectory& traj);

/// [{"k": k, "block": [[re, im] x 4]}, ...], entries row-major.
Json moments_to_json(const MomentFunctional& U);

/// {"scalar": [P_0, ...], "vector": [{"n": n, "top": P_2n, "bottom": P_2n+1}]},
/// each polynomial an ascending list of [re, im] coefficients.
Json polys_to_json(const std::vector<Polynomial>& P, const std::vector<VectorPolynomial>& B);

/// Runtime fields are written only when `timings` is set, so that reports
/// of identical runs are byte-identical.
Json report_to_json(const SuiteResult& result, bool timings);

struct ResolventRow {
  double t = 0.0;
  ResolventBlock block;
  std::optional<Block2> closed_form;
};

/// Columns t, re_z, im_z, re/im of R11 R12 R21 R22, tail_bound, and with
/// `closed_form` also re/im of the closed-form entries and their max gap.
std::string resolvent_csv(const std::vector<ResolventRow>& rows, bool closed_form);

/// Writes `content` to `path`, or to stdout when path is "-".
void write_text(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

}  // namespace ktoda::io
