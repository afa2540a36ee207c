#include "usm/problem.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "usm/airy.hpp"
#include "usm/error.hpp"

namespace usm {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string without_spaces(std::string_view s) {
  std::string r;
  for (char c : s) {
    if (!std::isspace(static_cast<unsigned char>(c))) r.push_back(c);
  }
  return r;
}

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
  fail(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what);
}

// Splits on commas that are not nested inside parentheses.
std::vector<std::string> split_top_level(std::string_view s) {
  std::vector<std::string> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '(') ++depth;
    if (s[i] == ')') --depth;
    if (s[i] == ',' && depth == 0) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  out.push_back(trim(s.substr(start)));
  return out;
}

bool is_decimal(std::string_view s) {
  try {
    ScalarTraits<double>::parse(s);
    return true;
  } catch (const Error&) {
    return false;
  }
}

std::vector<std::string> parse_list(std::size_t line, const std::string& value, bool allow_mu) {
  if (value.size() < 2 || value.front() != '[' || value.back() != ']') {
    parse_fail(line, "expected a [..] list, got '" + value + "'");
  }
  const std::string inner = trim(std::string_view(value).substr(1, value.size() - 2));
  std::vector<std::string> items;
  if (inner.empty()) return items;
  for (auto& tok : split_top_level(inner)) {
    const bool mu_token = tok == "mu" || tok == "-mu" || tok == "+mu";
    if (mu_token && !allow_mu) parse_fail(line, "'mu' is not allowed here");
    if (!mu_token && !is_decimal(tok)) parse_fail(line, "not a number: '" + tok + "'");
    items.push_back(tok == "+mu" ? "mu" : tok);
  }
  return items;
}

TargetSpec parse_target(std::size_t line, const std::string& raw) {
  const std::string t = without_spaces(raw);
  TargetSpec target;
  if (t.rfind("airy(", 0) == 0 && t.back() == ')') {
    target.kind = TargetSpec::Kind::Airy;
    std::string arg = t.substr(5, t.size() - 6);
    if (arg == "(1/mu)^(1/3)" || arg == "+(1/mu)^(1/3)" || arg == "-(1/mu)^(1/3)") {
      target.scaled_by_mu = true;
      target.sign = arg.front() == '-' ? -1 : 1;
      return target;
    }
    if (!is_decimal(arg)) parse_fail(line, "unsupported airy argument '" + arg + "'");
    target.text = arg;
    return target;
  }
  if (!is_decimal(t)) parse_fail(line, "boundary target is not a number or airy(..): '" + raw + "'");
  target.text = t;
  return target;
}

BoundarySpec parse_bc(std::size_t line, const std::string& value) {
  if (value.size() < 2 || value.front() != '(' || value.back() != ')') {
    parse_fail(line, "expected (point, derivative_order, target)");
  }
  const auto parts = split_top_level(std::string_view(value).substr(1, value.size() - 2));
  if (parts.size() != 3) parse_fail(line, "expected three fields in a boundary condition");
  BoundarySpec bc;
  if (!is_decimal(parts[0])) parse_fail(line, "bad boundary point '" + parts[0] + "'");
  const double point = ScalarTraits<double>::parse(parts[0]);
  if (point != 1.0 && point != -1.0) parse_fail(line, "boundary point must be -1 or 1");
  bc.point = point > 0 ? 1 : -1;
  try {
    std::size_t used = 0;
    bc.derivative_order = std::stoi(parts[1], &used);
    if (used != parts[1].size() || bc.derivative_order < 0) throw std::invalid_argument("");
  } catch (const std::exception&) {
    parse_fail(line, "bad derivative order '" + parts[1] + "'");
  }
  bc.target = parse_target(line, parts[2]);
  return bc;
}

std::size_t parse_index(std::size_t line, const std::string& key, std::size_t prefix) {
  const std::string digits = key.substr(prefix);
  if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char c) {
        return std::isdigit(static_cast<unsigned char>(c));
      })) {
    parse_fail(line, "bad key '" + key + "'");
  }
  if (digits.size() > 3) parse_fail(line, "index too large in '" + key + "'");
  return static_cast<std::size_t>(std::stoul(digits));
}

template <class T>
T token_value(const std::string& tok, const ProblemSpec& spec) {
  if (tok == "mu" || tok == "-mu") {
    if (!spec.mu) fail(ErrorCode::ParseError, "'mu' used but no mu key given");
    T mu = ScalarTraits<T>::parse(*spec.mu);
    return tok == "mu" ? mu : T(-mu);
  }
  return ScalarTraits<T>::parse(tok);
}

template <class T>
T target_value(const TargetSpec& target, const ProblemSpec& spec) {
  if (target.kind == TargetSpec::Kind::Literal) return ScalarTraits<T>::parse(target.text);
  const long bits = std::max<long>(ScalarTraits<T>::bits(), kDefaultExtendedBits) + 64;
  BigFloat z;
  {
    PrecisionScope scope(bits);
    if (target.scaled_by_mu) {
      if (!spec.mu) fail(ErrorCode::ParseError, "airy((1/mu)^(1/3)) used but no mu key given");
      const BigFloat mu(*spec.mu, bits);
      if (!(mu > BigFloat(0))) fail(ErrorCode::InvalidArgument, "mu must be positive");
      z = cbrt(BigFloat(1) / mu);
      if (target.sign < 0) z = -z;
    } else {
      z = BigFloat(target.text, bits);
    }
  }
  if constexpr (std::is_same_v<T, double>) {
    // Single rounding of the high-precision sum.
    PrecisionScope scope(bits);
    return airy_ai(z, PrecisionLevel::working64()).to_double();
  } else {
    PrecisionLevel level{PrecisionLevel::Kind::Extended, ScalarTraits<T>::bits()};
    return airy_ai(z, level);
  }
}

}  // namespace

ProblemSpec parse_problem_string(std::string_view text) {
  ProblemSpec spec;
  std::map<std::size_t, std::vector<std::string>> coeffs;
  std::map<std::size_t, BoundarySpec> bcs;
  std::map<std::string, std::size_t> seen;
  bool have_order = false;

  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) parse_fail(line_no, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (value.empty()) parse_fail(line_no, "empty value for '" + key + "'");
    if (seen.count(key)) {
      parse_fail(line_no, "duplicate key '" + key + "' (first on line " +
                              std::to_string(seen[key]) + ")");
    }
    seen[key] = line_no;

    if (key == "mu") {
      if (!is_decimal(value)) parse_fail(line_no, "mu is not a number");
      spec.mu = value;
    } else if (key == "order") {
      try {
        std::size_t used = 0;
        spec.order = std::stoi(value, &used);
        if (used != value.size()) throw std::invalid_argument("");
      } catch (const std::exception&) {
        parse_fail(line_no, "order must be an integer");
      }
      if (spec.order < 1 || spec.order > 16) parse_fail(line_no, "order must lie in [1, 16]");
      have_order = true;
    } else if (key.rfind("coeff.", 0) == 0) {
      coeffs[parse_index(line_no, key, 6)] = parse_list(line_no, value, true);
    } else if (key.rfind("bc.", 0) == 0) {
      bcs[parse_index(line_no, key, 3)] = parse_bc(line_no, value);
    } else if (key == "rhs") {
      spec.rhs = parse_list(line_no, value, false);
    } else if (key == "reference") {
      if (value == "solve") {
        spec.reference = ReferenceKind::ExtendedSolve;
      } else {
        spec.reference = ReferenceKind::Coefficients;
        spec.reference_coeffs = parse_list(line_no, value, false);
      }
    } else {
      parse_fail(line_no, "unknown key '" + key + "'");
    }
  }

  if (!have_order) fail(ErrorCode::ParseError, "missing 'order'");
  const auto order = static_cast<std::size_t>(spec.order);
  spec.coeffs.assign(order + 1, {});
  for (auto& [l, list] : coeffs) {
    if (l > order) fail(ErrorCode::ParseError, "coeff." + std::to_string(l) + " exceeds the order");
    spec.coeffs[l] = std::move(list);
  }
  if (!coeffs.count(order)) {
    fail(ErrorCode::ParseError, "missing leading coefficient coeff." + std::to_string(order));
  }
  if (bcs.size() != order) {
    fail(ErrorCode::ParseError, "expected " + std::to_string(order) + " boundary conditions, got " +
                                    std::to_string(bcs.size()));
  }
  for (std::size_t i = 0; i < order; ++i) {
    if (!bcs.count(i)) fail(ErrorCode::ParseError, "missing bc." + std::to_string(i));
    if (bcs[i].derivative_order >= spec.order) {
      fail(ErrorCode::ParseError, "bc." + std::to_string(i) + ": derivative order must be below the ODE order");
    }
    spec.bcs.push_back(bcs[i]);
  }
  const bool uses_mu = std::any_of(spec.coeffs.begin(), spec.coeffs.end(), [](const auto& list) {
    return std::any_of(list.begin(), list.end(), [](const auto& t) { return t == "mu" || t == "-mu"; });
  }) || std::any_of(spec.bcs.begin(), spec.bcs.end(), [](const auto& bc) {
    return bc.target.scaled_by_mu;
  });
  if (uses_mu && !spec.mu) fail(ErrorCode::ParseError, "'mu' is referenced but not defined");
  if (spec.mu && ScalarTraits<double>::parse(*spec.mu) <= 0.0) {
    fail(ErrorCode::ParseError, "mu must be positive");
  }
  return spec;
}

ProblemSpec parse_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open problem file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  if (in.bad()) fail(ErrorCode::IoError, "error reading '" + path + "'");
  return parse_problem_string(buf.str());
}

ProblemSpec airy_problem(std::string_view mu) {
  const std::string m = trim(mu);
  if (!is_decimal(m) || ScalarTraits<double>::parse(m) <= 0.0) {
    fail(ErrorCode::ParseError, "mu must be a positive decimal, got '" + m + "'");
  }
  ProblemSpec spec;
  spec.mu = m;
  spec.order = 2;
  spec.coeffs = {{"0", "-1"}, {"0"}, {"mu"}};
  BoundarySpec left{-1, 0, {TargetSpec::Kind::Airy, "0", true, -1}};
  BoundarySpec right{1, 0, {TargetSpec::Kind::Airy, "0", true, 1}};
  spec.bcs = {left, right};
  spec.rhs = {"0"};
  spec.reference = ReferenceKind::ExtendedSolve;
  return spec;
}

template <class T>
OdeProblem<T> materialize(const ProblemSpec& spec) {
  OdeProblem<T> p;
  p.order = spec.order;
  for (const auto& list : spec.coeffs) {
    std::vector<T> c;
    for (const auto& tok : list) c.push_back(token_value<T>(tok, spec));
    p.coeffs.push_back(std::move(c));
  }
  for (const auto& bc : spec.bcs) {
    p.bcs.push_back({bc.point, bc.derivative_order, target_value<T>(bc.target, spec)});
  }
  for (const auto& tok : spec.rhs) p.rhs.push_back(ScalarTraits<T>::parse(tok));
  validate(p);
  return p;
}

template <class T>
std::vector<T> reference_coefficients(const ProblemSpec& spec) {
  if (spec.reference != ReferenceKind::Coefficients) {
    fail(ErrorCode::InvalidArgument, "problem has no closed-form reference coefficients");
  }
  std::vector<T> out;
  for (const auto& tok : spec.reference_coeffs) out.push_back(ScalarTraits<T>::parse(tok));
  return out;
}

template OdeProblem<double> materialize<double>(const ProblemSpec&);
template OdeProblem<BigFloat> materialize<BigFloat>(const ProblemSpec&);
template std::vector<double> reference_coefficients<double>(const ProblemSpec&);
template std::vector<BigFloat> reference_coefficients<BigFloat>(const ProblemSpec&);

}  // namespace usm
