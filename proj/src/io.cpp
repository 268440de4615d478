#include "sdfilter/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace sdfilter {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double parse_strict_double(const std::string& raw, std::size_t line_no, const char* column) {
    const std::string s = trim(raw);
    if (s.empty()) {
        std::ostringstream msg;
        msg << "empty " << column << " value at line " << line_no;
        throw std::invalid_argument(msg.str());
    }
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) {
        std::ostringstream msg;
        msg << "non-numeric " << column << " value '" << s << "' at line " << line_no;
        throw std::invalid_argument(msg.str());
    }
    return v;
}

}  // namespace

SeriesData read_series_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open input file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("input CSV is empty: " + path);
    const auto header = split_csv_line(line);
    std::ptrdiff_t y_col = -1, t_col = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        const std::string name = trim(header[i]);
        if (name == "y") y_col = static_cast<std::ptrdiff_t>(i);
        if (name == "t") t_col = static_cast<std::ptrdiff_t>(i);
    }
    if (y_col < 0) throw std::invalid_argument("input CSV needs a header with a 'y' column");

    SeriesData data;
    if (t_col >= 0) data.t.emplace();
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (static_cast<std::size_t>(y_col) >= fields.size()) {
            std::ostringstream msg;
            msg << "missing y value at line " << line_no;
            throw std::invalid_argument(msg.str());
        }
        data.y.push_back(parse_strict_double(fields[y_col], line_no, "y"));
        if (t_col >= 0) {
            if (static_cast<std::size_t>(t_col) >= fields.size()) {
                std::ostringstream msg;
                msg << "missing t value at line " << line_no;
                throw std::invalid_argument(msg.str());
            }
            data.t->push_back(parse_strict_double(fields[t_col], line_no, "t"));
        }
    }
    if (data.y.empty()) throw std::invalid_argument("input CSV has no data rows: " + path);
    return data;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string render_sim_csv(const SimResult& result) {
    std::string out = result.latent ? "t,y,latent\n" : "t,y\n";
    for (std::size_t i = 0; i < result.y.size(); ++i) {
        out += std::to_string(i + 1);
        out += ',';
        out += format_double(result.y[i]);
        if (result.latent) {
            out += ',';
            out += format_double((*result.latent)[i]);
        }
        out += '\n';
    }
    return out;
}

std::string render_conjugate_trace_csv(const ConjugateTrace& trace) {
    std::string out = "t,y,mu_pred,mu_filt,tau,n,score,innovation\n";
    for (const auto& s : trace.steps) {
        out += std::to_string(s.t);
        out += ',';
        out += format_double(s.y);
        out += ',';
        out += format_double(s.mu_pred);
        out += ',';
        out += format_double(s.mu_filt);
        out += ',';
        out += format_double(s.tau);
        out += ',';
        out += format_double(s.n);
        out += ',';
        out += format_double(s.score);
        out += ',';
        out += format_double(s.innovation);
        out += '\n';
    }
    return out;
}

std::string render_recursion_trace_csv(const RecursionTrace& trace) {
    std::string out = "t,y,theta,mu,score,scaling,innovation,score_var,loglik,floored\n";
    for (const auto& s : trace.steps) {
        out += std::to_string(s.t);
        out += ',';
        out += format_double(s.y);
        out += ',';
        out += format_double(s.theta);
        out += ',';
        out += format_double(s.mu);
        out += ',';
        out += format_double(s.score);
        out += ',';
        out += format_double(s.scaling);
        out += ',';
        out += format_double(s.innovation);
        out += ',';
        out += format_double(s.score_var);
        out += ',';
        out += format_double(s.loglik);
        out += ',';
        out += s.floored ? '1' : '0';
        out += '\n';
    }
    return out;
}

std::string render_expansion_study_csv(const ExpansionStudy& study) {
    std::string out = "P,error\n";
    for (std::size_t i = 0; i < study.P_grid.size(); ++i) {
        out += format_double(study.P_grid[i]);
        out += ',';
        out += study.status[i] == StudyPointStatus::Ok ? format_double(study.errors[i])
                                                       : std::string("nan");
        out += '\n';
    }
    out += "slope=" + format_double(study.fitted_slope) + '\n';
    return out;
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        if (!std::cout) throw io_error("failed writing to standard output");
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open output file: " + path);
    out << content;
    if (!out) throw io_error("failed writing output file: " + path);
}

}  // namespace sdfilter
