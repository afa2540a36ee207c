#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "usm/assembly.hpp"
#include "usm/problem.hpp"
#include "usm/scalar.hpp"

namespace usm {

struct ExperimentConfig {
  ProblemSpec problem;
  // Strictly increasing, each above the Hessenberg index.
  std::vector<std::size_t> n_values;
  std::string mu_label;
  // n_dagger = ceil(n * cauchy_num / cauchy_den)
  std::uint64_t cauchy_num = 101;
  std::uint64_t cauchy_den = 100;
  long reference_bits = kDefaultExtendedBits;
};

struct DiagnosticsRecord {
  std::size_t n = 0;
  std::optional<double> total_error;
  std::optional<double> rounding_error;
  std::optional<double> cauchy_error;
  std::optional<double> q_tail_sum;
  std::optional<double> kappa_inf;
  std::optional<double> kappa_2;
  std::optional<double> cond_Eb;
  std::optional<double> rule_of_thumb;
  std::size_t k = 0;
  std::size_t m = 0;

  // Extra measurements, not part of the CSV schema.
  // max_j ||Q(j, n-m:n)|| / ||Q(j, n-m-1:n)|| over j < k
  std::optional<double> sigma;
  // ||reference(exact data) - reference(binary64 data)||_2
  std::optional<double> representation_error;
  // ||reference(binary64 data)(n:)||_2
  std::optional<double> truncation_error;
};

bool same_csv_fields(const DiagnosticsRecord& a, const DiagnosticsRecord& b);

inline constexpr const char* kCsvHeader =
    "n,total_error,rounding_error,cauchy_error,q_tail_sum,kappa_inf,kappa_2,cond_Eb,rule_of_thumb,k,m";

// ceil(n_min * factor^i) for i = 0, 1, ... while <= n_max, deduplicated,
// with n_max appended if missed.
std::vector<std::size_t> geometric_grid(std::size_t n_min, std::size_t n_max, double factor);

// ceil(n * num / den) in integer arithmetic.
std::size_t cauchy_partner(std::size_t n, std::uint64_t num, std::uint64_t den);

// Parses "1.01" into 101/100 exactly.
void parse_ratio(const std::string& text, std::uint64_t& num, std::uint64_t& den);

template <class T>
std::vector<T> solve_problem(const OdeProblem<T>& p, std::size_t n);

std::vector<BigFloat> promote_all(const std::vector<double>& v, long bits);

// k = max(nnz_f, chop(u_hat, eps)) from the binary64 solve at n.
std::size_t frozen_k(const OdeProblem<double>& p, std::size_t n);

struct ReferenceSolution {
  // Chebyshev coefficients of the exact-data solution (chopped).
  std::vector<BigFloat> exact;
  // Extended solve of the binary64-rounded data (chopped).
  std::vector<BigFloat> double_data;
  std::size_t n_ref = 0;
};

// NoReference (InvalidArgument) for problems without a reference.
ReferenceSolution reference_solution(const ExperimentConfig& cfg, std::size_t n_ref);

std::vector<DiagnosticsRecord> total_error_study(const ExperimentConfig& cfg);
std::vector<DiagnosticsRecord> rounding_error_study(const ExperimentConfig& cfg);
std::vector<DiagnosticsRecord> cauchy_error_study(const ExperimentConfig& cfg);
std::vector<DiagnosticsRecord> q_tail_study(const ExperimentConfig& cfg);
std::vector<DiagnosticsRecord> conditioning_study(const ExperimentConfig& cfg);

// Shortest round-trip decimal; "0" for +0.0.
std::string format_double(double x);

void write_csv(const std::vector<DiagnosticsRecord>& records, std::ostream& out);
// IoError on failure.
void write_csv(const std::vector<DiagnosticsRecord>& records, const std::string& path);
// ParseError on malformed rows.
std::vector<DiagnosticsRecord> read_csv(std::istream& in);
std::vector<DiagnosticsRecord> read_csv(const std::string& path);

}  // namespace usm
