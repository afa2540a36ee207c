// usm: command-line front end over the C API.

#include <CLI11.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "usm/usm.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInput = 2;
constexpr int kExitSingular = 3;
constexpr int kExitIo = 4;

constexpr std::size_t kDenseCap = 4096;
constexpr std::size_t kSolveCap = 100000;

int exit_code(usm_status s) {
  switch (s) {
    case USM_OK: return kExitOk;
    case USM_ERR_SINGULAR: return kExitSingular;
    case USM_ERR_IO: return kExitIo;
    case USM_ERR_INTERNAL: return kExitInternal;
    default: return kExitInput;
  }
}

int report(usm_status s) {
  std::fprintf(stderr, "usm: %s: %s\n", usm_status_name(s), usm_last_error());
  return exit_code(s);
}

struct ProblemDeleter {
  void operator()(usm_problem* p) const { usm_problem_destroy(p); }
};
struct RecordsDeleter {
  void operator()(usm_records* r) const { usm_records_destroy(r); }
};

struct Common {
  std::string airy;
  std::string problem;
  std::string out = "-";
};

struct Grid {
  std::size_t n = 0;
  std::size_t n_min = 10;
  std::size_t n_max = 2000;
  double n_factor = 1.2;
  std::string cauchy_factor = "1.01";
  long precision_bits = 256;
};

void add_common(CLI::App* cmd, Common& c) {
  auto* a = cmd->add_option("--airy", c.airy, "Built-in Airy problem mu u'' - x u = 0 with this mu");
  auto* p = cmd->add_option("--problem", c.problem, "Problem definition file")->check(CLI::ExistingFile);
  a->excludes(p);
  p->excludes(a);
  cmd->add_option("--out", c.out, "Output path, '-' for stdout")->capture_default_str();
}

void add_grid(CLI::App* cmd, Grid& g) {
  cmd->add_option("--n", g.n, "Single truncation size (overrides the grid)");
  cmd->add_option("--n-min", g.n_min, "Smallest n of the geometric grid")->capture_default_str();
  cmd->add_option("--n-max", g.n_max, "Largest n of the geometric grid")->capture_default_str();
  cmd->add_option("--n-factor", g.n_factor, "Grid ratio: n_i = ceil(n_min * factor^i)")->capture_default_str();
  cmd->add_option("--cauchy-factor", g.cauchy_factor, "n_dagger = ceil(factor * n), plain decimal")
      ->capture_default_str();
  cmd->add_option("--precision-bits", g.precision_bits, "Reference precision in bits (>= 256)")
      ->capture_default_str();
}

usm_status load(const Common& c, usm_problem** out) {
  if (!c.airy.empty()) return usm_problem_airy(c.airy.c_str(), out);
  return usm_problem_from_file(c.problem.c_str(), out);
}

std::string shortest(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

int run_solve(const Common& c, std::size_t n) {
  usm_problem* raw = nullptr;
  if (usm_status s = load(c, &raw); s != USM_OK) return report(s);
  std::unique_ptr<usm_problem, ProblemDeleter> problem(raw);
  if (n > kSolveCap) {
    std::fprintf(stderr, "usm: --n %zu exceeds the cap %zu\n", n, kSolveCap);
    return kExitInput;
  }
  std::vector<double> u(n);
  if (usm_status s = usm_solve(problem.get(), n, u.data()); s != USM_OK) return report(s);

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (c.out != "-") {
    file.open(c.out);
    if (!file) {
      std::fprintf(stderr, "usm: cannot open '%s' for writing\n", c.out.c_str());
      return kExitIo;
    }
    out = &file;
  }
  for (double v : u) *out << shortest(v) << '\n';
  out->flush();
  if (!*out) {
    std::fprintf(stderr, "usm: write failed\n");
    return kExitIo;
  }
  return kExitOk;
}

int run_study(const Common& c, const Grid& g, usm_study study, bool dense) {
  usm_problem* raw = nullptr;
  if (usm_status s = load(c, &raw); s != USM_OK) return report(s);
  std::unique_ptr<usm_problem, ProblemDeleter> problem(raw);

  usm_study_options opts;
  usm_study_options_init(&opts);
  const std::size_t single = g.n;
  if (g.n != 0) {
    opts.n_values = &single;
    opts.n_count = 1;
  }
  opts.n_min = g.n_min;
  opts.n_max = g.n_max;
  opts.n_factor = g.n_factor;
  opts.cauchy_factor = g.cauchy_factor.c_str();
  opts.reference_bits = g.precision_bits;
  const std::size_t largest = g.n != 0 ? g.n : g.n_max;
  const std::size_t cap = dense ? kDenseCap : kSolveCap;
  if (largest > cap) {
    std::fprintf(stderr, "usm: n = %zu exceeds the cap %zu for this study\n", largest, cap);
    return kExitInput;
  }

  usm_records* rec_raw = nullptr;
  if (usm_status s = usm_run_study(problem.get(), study, &opts, &rec_raw); s != USM_OK) {
    return report(s);
  }
  std::unique_ptr<usm_records, RecordsDeleter> records(rec_raw);
  if (usm_status s = usm_records_write_csv(records.get(), c.out.c_str()); s != USM_OK) {
    return report(s);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ultraspherical spectral method: solves and error studies"};
  app.require_subcommand(1);

  Common solve_c;
  std::size_t solve_n = 0;
  auto* solve = app.add_subcommand("solve", "Solve at one n and print the Chebyshev coefficients");
  add_common(solve, solve_c);
  solve->add_option("--n", solve_n, "Truncation size")->required();

  struct StudyCmd {
    const char* name;
    const char* help;
    usm_study study;
    bool dense;
    Common common;
    Grid grid;
    CLI::App* cmd = nullptr;
  };
  std::vector<StudyCmd> studies = {
      {"study-total", "Total error against the Extended reference", USM_STUDY_TOTAL, false, {}, {}},
      {"study-rounding", "Rounding error: binary64 vs Extended solve of the same system",
       USM_STUDY_ROUNDING, false, {}, {}},
      {"study-cauchy", "Cauchy error ||u_n - u_ndagger(1:n)||_2", USM_STUDY_CAUCHY, false, {}, {}},
      {"study-qtail", "Tail norms of the rows of Q next to the Cauchy error", USM_STUDY_QTAIL, true, {}, {}},
      {"study-cond", "kappa_inf, kappa_2, cond_Eb and the rule-of-thumb estimate", USM_STUDY_COND, true,
       {}, {}},
  };
  for (auto& s : studies) {
    s.cmd = app.add_subcommand(s.name, s.help);
    add_common(s.cmd, s.common);
    add_grid(s.cmd, s.grid);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "usm: %s\n\n", e.what());
    std::cerr << app.help();
    return kExitInput;
  }

  auto need_problem = [](const Common& c) {
    if (c.airy.empty() && c.problem.empty()) {
      std::fprintf(stderr, "usm: one of --airy or --problem is required\n");
      return false;
    }
    return true;
  };

  if (solve->parsed()) {
    if (!need_problem(solve_c)) return kExitInput;
    return run_solve(solve_c, solve_n);
  }
  for (auto& s : studies) {
    if (s.cmd->parsed()) {
      if (!need_problem(s.common)) return kExitInput;
      return run_study(s.common, s.grid, s.study, s.dense);
    }
  }
  return kExitInput;
}
