#include "walshms/csv.hpp"

#include <charconv>
#include <stdexcept>

namespace walshms {

std::string format_double(double v) {
    char buf[48];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    if (res.ec != std::errc{}) throw std::runtime_error("format_double failed");
    return std::string(buf, res.ptr);
}

namespace {

std::string sanitize(const std::string& status) {
    std::string out = status;
    for (char& c : out)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    return out;
}

}  // namespace

void write_scan_csv(std::ostream& out, const std::vector<CsvRow>& rows) {
    out << "axis,axis_value,analytic,oracle,status\n";
    for (const auto& row : rows) {
        out << row.axis << ',' << format_double(row.axis_value) << ',';
        if (row.analytic) out << format_double(*row.analytic);
        out << ',';
        if (row.oracle) out << format_double(*row.oracle);
        out << ',' << sanitize(row.status) << '\n';
    }
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
    out << "t,re_alpha_up,im_alpha_up,re_alpha_down,im_alpha_down\n";
    for (const auto& s : trajectory.samples) {
        out << format_double(s.t) << ',' << format_double(s.alpha_up.real()) << ','
            << format_double(s.alpha_up.imag()) << ',' << format_double(s.alpha_down.real())
            << ',' << format_double(s.alpha_down.imag()) << '\n';
    }
}

}  // namespace walshms
