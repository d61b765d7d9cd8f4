// SPDX-License-Identifier: Apache-2.0

#include "everkin/runlog.hpp"

#include <istream>
#include <ostream>

#include "everkin/csv.hpp"
#include "everkin/errors.hpp"

namespace everkin {

namespace {

// Flag tokens, LSB first; the CSV cell is the set bits' tokens joined
// with '|', empty when no flag is set.
constexpr const char* kFlagTokens[] = {"theta_undef", "clamped", "target_oow",
                                       "buckled"};
constexpr unsigned kKnownFlags = 0xFu;

std::string flags_to_cell(unsigned flags) {
    std::string cell;
    for (unsigned bit = 0; bit < 4; ++bit) {
        if (flags & (1u << bit)) {
            if (!cell.empty()) cell += '|';
            cell += kFlagTokens[bit];
        }
    }
    return cell;
}

unsigned cell_to_flags(std::string_view cell, int line_no) {
    unsigned flags = 0;
    std::size_t start = 0;
    while (start < cell.size()) {
        std::size_t bar = cell.find('|', start);
        std::string_view tok = cell.substr(
            start, bar == std::string_view::npos ? cell.size() - start : bar - start);
        bool known = false;
        for (unsigned bit = 0; bit < 4; ++bit) {
            if (tok == kFlagTokens[bit]) {
                flags |= 1u << bit;
                known = true;
                break;
            }
        }
        if (!known)
            throw ParseError("unknown flag token '" + std::string(tok) + "'", line_no);
        if (bar == std::string_view::npos) break;
        start = bar + 1;
    }
    return flags & kKnownFlags;
}

}  // namespace

void write_runlog_csv(std::ostream& out, const RunLog& log) {
    out << "# experiment: " << log.experiment << '\n';
    out << "# seed: " << log.seed << '\n';
    if (!log.config_json.empty()) out << "# config: " << log.config_json << '\n';
    out << kRunLogHeader << '\n';
    for (const RunLogRow& r : log.rows) {
        const double cols[] = {r.time_s,    r.R_des,     r.alpha_des, r.theta_des,
                               r.R_real,    r.alpha_real, r.theta_real, r.mu_R,
                               r.mu_phi[0], r.mu_phi[1], r.mu_phi[2], r.phi[0],
                               r.phi[1],    r.phi[2],    r.e_R,       r.e_alpha,
                               r.e_theta};
        for (double c : cols) out << csv::format_double(c) << ',';
        out << flags_to_cell(r.flags) << '\n';
    }
}

RunLog parse_runlog_csv(std::istream& in) {
    RunLog log;
    std::string line;
    int line_no = 0;
    bool saw_header = false;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.rfind("# ", 0) == 0) {
            if (saw_header)
                throw ParseError("metadata after the header", line_no);
            std::string_view body(line);
            body.remove_prefix(2);
            if (body.rfind("experiment: ", 0) == 0)
                log.experiment = std::string(body.substr(12));
            else if (body.rfind("seed: ", 0) == 0)
                log.seed = static_cast<std::uint64_t>(
                    csv::parse_double(body.substr(6), line_no));
            else if (body.rfind("config: ", 0) == 0)
                log.config_json = std::string(body.substr(8));
            // unknown comments are allowed and skipped
            continue;
        }
        if (!saw_header) {
            if (line != kRunLogHeader)
                throw SchemaError("unexpected run-log header: " + line);
            saw_header = true;
            continue;
        }
        if (line.empty()) continue;

        auto fields = csv::split_fields(line);
        if (fields.size() != 18)
            throw ParseError("expected 18 fields, got " +
                                 std::to_string(fields.size()),
                             line_no);
        RunLogRow r;
        double* cols[] = {&r.time_s,    &r.R_des,      &r.alpha_des,  &r.theta_des,
                          &r.R_real,    &r.alpha_real, &r.theta_real, &r.mu_R,
                          &r.mu_phi[0], &r.mu_phi[1],  &r.mu_phi[2],  &r.phi[0],
                          &r.phi[1],    &r.phi[2],     &r.e_R,        &r.e_alpha,
                          &r.e_theta};
        for (int i = 0; i < 17; ++i) *cols[i] = csv::parse_double(fields[i], line_no);
        r.flags = cell_to_flags(fields[17], line_no);
        if (!log.rows.empty() && !(r.time_s > log.rows.back().time_s))
            throw ParseError("time must increase monotonically", line_no);
        log.rows.push_back(r);
    }
    if (!saw_header) throw SchemaError("run-log header not found");
    return log;
}

}  // namespace everkin
