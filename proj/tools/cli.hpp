#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace qtomo::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kValidation = 1;
inline constexpr int kNumerical = 2;

/// Runs the command line (without the program name). Output goes to `out`,
/// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct FigureOptions {
  std::uint64_t seed = 1;
  int reps = 100;
  int threads = 0;
  std::filesystem::path out_dir;
};

/// Figure-reproduction runs; each writes CSV files into opts.out_dir and a
/// short summary to `out`.
void run_fig1(const FigureOptions& opts, std::ostream& out);
void run_fig2(const FigureOptions& opts, std::ostream& out);
void run_fig3(const FigureOptions& opts, std::ostream& out);
void run_fig4(const FigureOptions& opts, std::ostream& out);

/// %.6g
std::string short_number(double v);

}  // namespace qtomo::cli
