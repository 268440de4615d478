#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sdfilter/conjugate.hpp"
#include "sdfilter/local_approx.hpp"
#include "sdfilter/recursions.hpp"
#include "sdfilter/simulate.hpp"

namespace sdfilter {

/// Thrown for unreadable/unwritable files; maps to CLI exit code 2.
class io_error : public std::runtime_error {
  public:
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

struct SeriesData {
    std::vector<double> y;
    std::optional<std::vector<double>> t;
};

/// Reads a CSV with a mandatory header row containing a `y` column and an
/// optional `t` column. Rows with non-numeric y are a hard error.
SeriesData read_series_csv(const std::string& path);

/// Deterministic double formatting (%.17g) used for all CSV output.
std::string format_double(double v);

std::string render_sim_csv(const SimResult& result);
std::string render_conjugate_trace_csv(const ConjugateTrace& trace);
std::string render_recursion_trace_csv(const RecursionTrace& trace);
std::string render_expansion_study_csv(const ExpansionStudy& study);

/// Writes to the path, or to stdout when path is empty.
void write_output(const std::string& path, const std::string& content);

}  // namespace sdfilter
