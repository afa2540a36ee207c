#include "usm/diagnostics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "usm/conditioning.hpp"
#include "usm/error.hpp"
#include "usm/qr.hpp"
#include "usm/series.hpp"

namespace usm {

namespace {

struct Setup {
  OdeProblem<double> problem;
  std::size_t m = 0;
  std::size_t k = 0;
};

Setup prepare(const ExperimentConfig& cfg) {
  if (cfg.n_values.empty()) fail(ErrorCode::InvalidArgument, "study needs at least one n");
  if (cfg.cauchy_den == 0 || cfg.cauchy_num <= cfg.cauchy_den) {
    fail(ErrorCode::InvalidArgument, "cauchy factor must be a ratio greater than 1");
  }
  if (cfg.reference_bits < kDefaultExtendedBits) {
    fail(ErrorCode::InvalidArgument, "reference precision needs at least 256 bits");
  }
  Setup s;
  s.problem = materialize<double>(cfg.problem);
  s.m = hessenberg_index(s.problem);
  const auto order = static_cast<std::size_t>(s.problem.order);
  for (std::size_t i = 0; i < cfg.n_values.size(); ++i) {
    const std::size_t n = cfg.n_values[i];
    if (i > 0 && n <= cfg.n_values[i - 1]) {
      fail(ErrorCode::InvalidArgument, "n values must be strictly increasing");
    }
    if (n <= s.m || n <= order) {
      fail(ErrorCode::InvalidArgument, "n = " + std::to_string(n) + " must exceed m = " +
                                           std::to_string(s.m) + " and the order");
    }
  }
  s.k = frozen_k(s.problem, cfg.n_values.back());
  return s;
}

DiagnosticsRecord blank(std::size_t n, const Setup& s) {
  DiagnosticsRecord r;
  r.n = n;
  r.k = s.k;
  r.m = s.m;
  return r;
}

AlmostBandedMatrix<BigFloat> promote_matrix(const AlmostBandedMatrix<double>& a, long bits) {
  const PrecisionLevel level = PrecisionLevel::extended(bits);
  return a.convert<BigFloat>([&](double v) { return promote(v, level); });
}

// ||a - b||_2 in Extended, shorter vector zero-padded.
double difference_norm(const std::vector<BigFloat>& a, const std::vector<BigFloat>& b, long bits) {
  PrecisionScope scope(bits);
  const std::size_t len = std::max(a.size(), b.size());
  std::vector<BigFloat> d(len, BigFloat(0));
  for (std::size_t i = 0; i < len; ++i) {
    if (i < a.size()) d[i] += a[i];
    if (i < b.size()) d[i] -= b[i];
  }
  return norm2(std::span<const BigFloat>(d)).to_double();
}

std::vector<BigFloat> chopped(std::vector<BigFloat> u, long bits) {
  const BigFloat tol = BigFloat::pow2(1 - bits, 64);
  u.resize(chop(std::span<const BigFloat>(u), tol));
  return u;
}

// Extended solve of the binary64 system, promoted exactly.
std::vector<BigFloat> extended_solve(const AssembledSystem<double>& sys, long bits) {
  PrecisionScope scope(bits);
  const auto a = promote_matrix(sys.A, bits);
  const auto f = promote_all(sys.f, bits);
  return solve(a, std::span<const BigFloat>(f));
}

void check_dense(std::size_t n, const char* study) {
  if (n > kDenseCutoff) {
    fail(ErrorCode::DenseCutoff, std::string(study) + ": n = " + std::to_string(n) +
                                     " exceeds the dense cutoff " + std::to_string(kDenseCutoff));
  }
}

double cauchy_error(const OdeProblem<double>& p, std::size_t n, const ExperimentConfig& cfg,
                    const std::vector<double>& u_n) {
  const std::size_t nd = cauchy_partner(n, cfg.cauchy_num, cfg.cauchy_den);
  std::vector<double> u_d = solve_problem(p, nd);
  u_d.resize(n);
  return difference_norm(promote_all(u_n, cfg.reference_bits), promote_all(u_d, cfg.reference_bits),
                         cfg.reference_bits);
}

std::optional<double> parse_field(const std::string& field, std::size_t line) {
  if (field.empty()) return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    fail(ErrorCode::ParseError, "csv line " + std::to_string(line) + ": bad number '" + field + "'");
  }
  return v;
}

std::size_t parse_count(const std::string& field, std::size_t line) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    fail(ErrorCode::ParseError, "csv line " + std::to_string(line) + ": bad integer '" + field + "'");
  }
  return v;
}

}  // namespace

bool same_csv_fields(const DiagnosticsRecord& a, const DiagnosticsRecord& b) {
  auto same = [](const std::optional<double>& x, const std::optional<double>& y) {
    if (x.has_value() != y.has_value()) return false;
    if (!x) return true;
    if (std::isnan(*x) && std::isnan(*y)) return true;
    return *x == *y && std::signbit(*x) == std::signbit(*y);
  };
  return a.n == b.n && same(a.total_error, b.total_error) &&
         same(a.rounding_error, b.rounding_error) && same(a.cauchy_error, b.cauchy_error) &&
         same(a.q_tail_sum, b.q_tail_sum) && same(a.kappa_inf, b.kappa_inf) &&
         same(a.kappa_2, b.kappa_2) && same(a.cond_Eb, b.cond_Eb) &&
         same(a.rule_of_thumb, b.rule_of_thumb) && a.k == b.k && a.m == b.m;
}

std::vector<std::size_t> geometric_grid(std::size_t n_min, std::size_t n_max, double factor) {
  if (n_min == 0 || n_max < n_min) fail(ErrorCode::InvalidArgument, "grid needs 0 < n_min <= n_max");
  if (!(factor > 1.0)) fail(ErrorCode::InvalidArgument, "grid factor must exceed 1");
  std::vector<std::size_t> grid;
  for (int i = 0;; ++i) {
    const double v = std::ceil(static_cast<double>(n_min) * std::pow(factor, i));
    if (v > static_cast<double>(n_max)) break;
    const auto n = static_cast<std::size_t>(v);
    if (grid.empty() || n > grid.back()) grid.push_back(n);
  }
  if (grid.empty() || grid.back() != n_max) grid.push_back(n_max);
  return grid;
}

std::size_t cauchy_partner(std::size_t n, std::uint64_t num, std::uint64_t den) {
  if (den == 0) fail(ErrorCode::InvalidArgument, "cauchy factor with zero denominator");
  const unsigned __int128 prod = static_cast<unsigned __int128>(n) * num;
  return static_cast<std::size_t>((prod + den - 1) / den);
}

void parse_ratio(const std::string& text, std::uint64_t& num, std::uint64_t& den) {
  const auto dot = text.find('.');
  const std::string whole = text.substr(0, dot);
  const std::string frac = dot == std::string::npos ? "" : text.substr(dot + 1);
  auto digits = [](const std::string& s) {
    return std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
  };
  if ((whole.empty() && frac.empty()) || !digits(whole) || !digits(frac) || frac.size() > 9 ||
      whole.size() > 9) {
    fail(ErrorCode::ParseError, "expected a plain decimal ratio like 1.01, got '" + text + "'");
  }
  den = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
  num = (whole.empty() ? 0 : std::stoull(whole)) * den + (frac.empty() ? 0 : std::stoull(frac));
}

template <class T>
std::vector<T> solve_problem(const OdeProblem<T>& p, std::size_t n) {
  const AssembledSystem<T> sys = assemble(p, n);
  return solve(sys.A, std::span<const T>(sys.f));
}

template std::vector<double> solve_problem<double>(const OdeProblem<double>&, std::size_t);
template std::vector<BigFloat> solve_problem<BigFloat>(const OdeProblem<BigFloat>&, std::size_t);

std::vector<BigFloat> promote_all(const std::vector<double>& v, long bits) {
  const PrecisionLevel level = PrecisionLevel::extended(bits);
  std::vector<BigFloat> out;
  out.reserve(v.size());
  for (double x : v) out.push_back(promote(x, level));
  return out;
}

std::size_t frozen_k(const OdeProblem<double>& p, std::size_t n) {
  const AssembledSystem<double> sys = assemble(p, n);
  const std::vector<double> u = solve(sys.A, std::span<const double>(sys.f));
  return effective_support(std::span<const double>(sys.f), std::span<const double>(u),
                           machine_epsilon_working());
}

ReferenceSolution reference_solution(const ExperimentConfig& cfg, std::size_t n_ref) {
  const long bits = cfg.reference_bits;
  if (cfg.problem.reference == ReferenceKind::None) {
    fail(ErrorCode::InvalidArgument,
         "problem has no reference solution; add 'reference = solve' or exact coefficients");
  }
  PrecisionScope scope(bits);
  ReferenceSolution ref;
  ref.n_ref = n_ref;
  const OdeProblem<double> pd = materialize<double>(cfg.problem);
  ref.double_data = chopped(extended_solve(assemble(pd, n_ref), bits), bits);
  if (cfg.problem.reference == ReferenceKind::Coefficients) {
    ref.exact = reference_coefficients<BigFloat>(cfg.problem);
  } else {
    const OdeProblem<BigFloat> pe = materialize<BigFloat>(cfg.problem);
    ref.exact = chopped(solve_problem(pe, n_ref), bits);
  }
  return ref;
}

std::vector<DiagnosticsRecord> total_error_study(const ExperimentConfig& cfg) {
  const Setup s = prepare(cfg);
  const long bits = cfg.reference_bits;
  const ReferenceSolution ref = reference_solution(cfg, 4 * cfg.n_values.back());
  const double repr = difference_norm(ref.exact, ref.double_data, bits);
  std::vector<DiagnosticsRecord> out;
  for (std::size_t n : cfg.n_values) {
    DiagnosticsRecord r = blank(n, s);
    const std::vector<double> u = solve_problem(s.problem, n);
    r.total_error = difference_norm(promote_all(u, bits), ref.exact, bits);
    r.representation_error = repr;
    {
      PrecisionScope scope(bits);
      std::vector<BigFloat> tail;
      for (std::size_t i = n; i < ref.double_data.size(); ++i) tail.push_back(ref.double_data[i]);
      r.truncation_error = norm2(std::span<const BigFloat>(tail)).to_double();
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<DiagnosticsRecord> rounding_error_study(const ExperimentConfig& cfg) {
  const Setup s = prepare(cfg);
  const long bits = cfg.reference_bits;
  std::vector<DiagnosticsRecord> out;
  for (std::size_t n : cfg.n_values) {
    DiagnosticsRecord r = blank(n, s);
    const AssembledSystem<double> sys = assemble(s.problem, n);
    const std::vector<double> u = solve(sys.A, std::span<const double>(sys.f));
    r.rounding_error = difference_norm(promote_all(u, bits), extended_solve(sys, bits), bits);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<DiagnosticsRecord> cauchy_error_study(const ExperimentConfig& cfg) {
  const Setup s = prepare(cfg);
  std::vector<DiagnosticsRecord> out;
  for (std::size_t n : cfg.n_values) {
    DiagnosticsRecord r = blank(n, s);
    r.cauchy_error = cauchy_error(s.problem, n, cfg, solve_problem(s.problem, n));
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<DiagnosticsRecord> q_tail_study(const ExperimentConfig& cfg) {
  const Setup s = prepare(cfg);
  check_dense(cfg.n_values.back(), "q_tail_study");
  std::vector<DiagnosticsRecord> out;
  for (std::size_t n : cfg.n_values) {
    DiagnosticsRecord r = blank(n, s);
    const AssembledSystem<double> sys = assemble(s.problem, n);
    const auto qr = qr_factor(sys.A);
    const std::size_t tail = std::min(s.m, n);
    double sum = 0.0;
    double sigma = 0.0;
    for (std::size_t j = 0; j < std::min(s.k, n); ++j) {
      // Row j of Q is Q^T e_j read as a row.
      const std::vector<double> row = apply_qt_unit(qr, j);
      const auto span = std::span<const double>(row);
      const double num = norm2(span.subspan(n - tail));
      const double den = norm2(span.subspan(n - std::min(tail + 1, n)));
      sum += num;
      if (den > 0.0) sigma = std::max(sigma, num / den);
    }
    r.q_tail_sum = sum;
    r.sigma = sigma;
    const std::vector<double> u = back_substitute(qr, std::span<const double>(apply_qt(qr, std::span<const double>(sys.f))));
    r.cauchy_error = cauchy_error(s.problem, n, cfg, u);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<DiagnosticsRecord> conditioning_study(const ExperimentConfig& cfg) {
  const Setup s = prepare(cfg);
  check_dense(cfg.n_values.back(), "conditioning_study");
  const long bits = cfg.reference_bits;
  std::vector<DiagnosticsRecord> out;
  for (std::size_t n : cfg.n_values) {
    DiagnosticsRecord r = blank(n, s);
    const AssembledSystem<double> sys = assemble(s.problem, n);
    const std::vector<double> u = solve(sys.A, std::span<const double>(sys.f));
    const auto rep = conditioning_report(sys.A, std::span<const double>(sys.f),
                                         std::span<const double>(u), s.k, s.m);
    r.kappa_inf = rep.kappa_inf;
    r.kappa_2 = rep.kappa_2;
    r.cond_Eb = rep.cond_Eb;
    r.rule_of_thumb = rep.rule_of_thumb;
    r.rounding_error = difference_norm(promote_all(u, bits), extended_solve(sys, bits), bits);
    out.push_back(std::move(r));
  }
  return out;
}

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) fail(ErrorCode::IoError, "number formatting failed");
  return std::string(buf, ptr);
}

void write_csv(const std::vector<DiagnosticsRecord>& records, std::ostream& out) {
  auto field = [&](const std::optional<double>& v) {
    out << ',';
    if (v) out << format_double(*v);
  };
  out << kCsvHeader << '\n';
  for (const auto& r : records) {
    out << r.n;
    field(r.total_error);
    field(r.rounding_error);
    field(r.cauchy_error);
    field(r.q_tail_sum);
    field(r.kappa_inf);
    field(r.kappa_2);
    field(r.cond_Eb);
    field(r.rule_of_thumb);
    out << ',' << r.k << ',' << r.m << '\n';
  }
  if (!out) fail(ErrorCode::IoError, "failed writing csv");
}

void write_csv(const std::vector<DiagnosticsRecord>& records, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::IoError, "cannot open '" + path + "' for writing");
  write_csv(records, static_cast<std::ostream&>(out));
  out.close();
  if (!out) fail(ErrorCode::IoError, "failed writing '" + path + "'");
}

std::vector<DiagnosticsRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    fail(ErrorCode::ParseError, "csv: missing or unexpected header");
  }
  std::vector<DiagnosticsRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::size_t start = 0;
    for (;;) {
      const auto comma = line.find(',', start);
      f.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (f.size() != 11) {
      fail(ErrorCode::ParseError, "csv line " + std::to_string(line_no) + ": expected 11 fields");
    }
    DiagnosticsRecord r;
    r.n = parse_count(f[0], line_no);
    r.total_error = parse_field(f[1], line_no);
    r.rounding_error = parse_field(f[2], line_no);
    r.cauchy_error = parse_field(f[3], line_no);
    r.q_tail_sum = parse_field(f[4], line_no);
    r.kappa_inf = parse_field(f[5], line_no);
    r.kappa_2 = parse_field(f[6], line_no);
    r.cond_Eb = parse_field(f[7], line_no);
    r.rule_of_thumb = parse_field(f[8], line_no);
    r.k = parse_count(f[9], line_no);
    r.m = parse_count(f[10], line_no);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<DiagnosticsRecord> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open '" + path + "'");
  return read_csv(static_cast<std::istream&>(in));
}

}  // namespace usm
