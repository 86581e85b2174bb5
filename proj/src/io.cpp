#include "ktoda/io.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace ktoda::io {

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Json to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw InvalidArgument(field + ": expected a [re, im] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

namespace {

Json complex_array(std::span<const Complex> xs) {
  Json out = Json::array();
  for (const auto& x : xs) out.push_back(to_json(x));
  return out;
}

std::vector<Complex> complex_vector(const Json& j, const std::string& field) {
  if (!j.contains(field)) throw InvalidArgument(field + ": missing");
  const Json& arr = j.at(field);
  if (!arr.is_array()) throw InvalidArgument(field + ": expected an array of [re, im] pairs");
  std::vector<Complex> out;
  out.reserve(arr.size());
  for (std::size_t k = 0; k < arr.size(); ++k)
    out.push_back(complex_from_json(arr[k], field + "[" + std::to_string(k) + "]"));
  return out;
}

Json block_json(const Block2& B) {
  return Json::array({to_json(B(0, 0)), to_json(B(0, 1)), to_json(B(1, 0)), to_json(B(1, 1))});
}

Json poly_json(const Polynomial& p) { return complex_array(p.coefficients()); }

void put_complex(std::ostringstream& os, Complex z) {
  os << ',' << format_double(z.real()) << ',' << format_double(z.imag());
}

}  // namespace

Json state_to_json(const LatticeState& s) {
  return Json{{"a", complex_array(s.diagonal())},
              {"b", complex_array(s.subdiagonal())},
              {"c", complex_array(s.second_subdiagonal())},
              {"t", s.time()}};
}

LatticeState state_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidArgument("state: expected an object with a, b, c");
  double t = 0.0;
  if (j.contains("t")) {
    if (!j["t"].is_number()) throw InvalidArgument("t: expected a number");
    t = j["t"].get<double>();
  }
  return LatticeState(complex_vector(j, "a"), complex_vector(j, "b"), complex_vector(j, "c"), t);
}

std::string trajectory_csv(const Trajectory& traj) {
  const std::size_t m = traj.front().state.dimension();
  std::ostringstream os;
  os << 't';
  auto header = [&](char name, std::size_t count) {
    for (std::size_t n = 1; n <= count; ++n)
      os << ",re_" << name << n << ",im_" << name << n;
  };
  header('a', m);
  header('b', m - 1);
  header('c', m - 2);
  os << ",re_q1,im_q1,re_q2,im_q2,re_q3,im_q3\n";
  for (const auto& s : traj.samples()) {
    os << format_double(s.time());
    for (const auto& x : s.state.diagonal()) put_complex(os, x);
    for (const auto& x : s.state.subdiagonal()) put_complex(os, x);
    for (const auto& x : s.state.second_subdiagonal()) put_complex(os, x);
    put_complex(os, s.q1);
    put_complex(os, s.q2);
    put_complex(os, s.q3);
    os << '\n';
  }
  return os.str();
}

Json moments_to_json(const MomentFunctional& U) {
  Json out = Json::array();
  for (std::size_t k = 0; k <= U.max_order(); ++k)
    out.push_back(Json{{"k", k}, {"block", block_json(U.moment(k))}});
  return out;
}

Json polys_to_json(const std::vector<Polynomial>& P, const std::vector<VectorPolynomial>& B) {
  Json scalar = Json::array();
  for (const auto& p : P) scalar.push_back(poly_json(p));
  Json vector = Json::array();
  for (std::size_t n = 0; n < B.size(); ++n)
    vector.push_back(Json{{"n", n}, {"top", poly_json(B[n].top)}, {"bottom", poly_json(B[n].bottom)}});
  return Json{{"scalar", scalar}, {"vector", vector}};
}

namespace {

// JSON has no infinity; a diverged residual is written as null.
Json number_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

}  // namespace

Json report_to_json(const SuiteResult& result, bool timings) {
  Json checks = Json::array();
  for (const auto& c : result.checks) {
    Json entry{{"id", c.id},
               {"instance",
                {{"seed", c.instance.seed},
                 {"m", c.instance.m},
                 {"h", c.instance.h},
                 {"t_range", Json::array({c.instance.t_begin, c.instance.t_end})}}},
               {"max_residual", number_or_null(c.max_residual)},
               {"threshold", c.threshold},
               {"pass", c.pass},
               {"expect_fail", c.expect_fail}};
    if (timings) entry["runtime_seconds"] = c.runtime_seconds;
    checks.push_back(std::move(entry));
  }
  Json controls = Json::array();
  for (const auto& c : result.controls)
    controls.push_back(Json{{"kind", std::string(to_string(c.corruption.kind))},
                            {"magnitude", c.corruption.magnitude},
                            {"seed", c.seed},
                            {"max_residual", number_or_null(c.max_residual)},
                            {"detection_threshold", thresholds::control_detection},
                            {"detected", c.detected}});
  Json convergence = Json::array();
  for (const auto& c : result.convergence)
    convergence.push_back(Json{{"id", c.id},
                               {"seed", c.seed},
                               {"h", c.h},
                               {"residual_h", c.residual_h},
                               {"residual_half_h", c.residual_half},
                               {"ratio", number_or_null(c.ratio)},
                               {"pass", c.pass}});
  return Json{{"ok", result.ok()},
              {"checks", checks},
              {"controls", controls},
              {"convergence", convergence}};
}

std::string resolvent_csv(const std::vector<ResolventRow>& rows, bool closed_form) {
  std::ostringstream os;
  os << "t,re_z,im_z,re_r11,im_r11,re_r12,im_r12,re_r21,im_r21,re_r22,im_r22,tail_bound";
  if (closed_form)
    os << ",re_cf11,im_cf11,re_cf12,im_cf12,re_cf21,im_cf21,re_cf22,im_cf22,closed_form_gap";
  os << '\n';
  for (const auto& row : rows) {
    const Block2& R = row.block.value;
    os << format_double(row.t);
    put_complex(os, row.block.z);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) put_complex(os, R(i, j));
    os << ',' << format_double(row.block.tail_bound);
    if (closed_form) {
      if (!row.closed_form) throw InvalidArgument("resolvent_csv: closed form missing for a row");
      const Block2& C = *row.closed_form;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) put_complex(os, C(i, j));
      os << ',' << format_double((C - R).cwiseAbs().maxCoeff());
    }
    os << '\n';
  }
  return os.str();
}

void write_text(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("out: cannot open " + path + " for writing");
  out << content;
  if (!out) throw InvalidArgument("out: write to " + path + " failed");
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace ktoda::io
