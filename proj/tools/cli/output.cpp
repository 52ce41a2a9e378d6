#include "output.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace curvehedge::cli {

std::string format_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string Table::str() const {
    std::string s;
    for (const auto& [k, v] : meta_) s += "# " + k + ": " + v + "\n";
    s += "section,steps,date,maturity,quantity,value,se,status\n";
    for (const auto& r : rows_) {
        s += r.section + ",";
        if (r.steps) s += std::to_string(*r.steps);
        s += ",";
        if (r.date) s += format_number(*r.date);
        s += ",";
        if (r.maturity) s += format_number(*r.maturity);
        s += "," + r.quantity + "," + format_number(r.value) + "," + format_number(r.se) + "," + r.status + "\n";
    }
    return s;
}

void Table::write(const std::string& dir, const std::string& name) const {
    std::filesystem::create_directories(dir);
    const auto path = std::filesystem::path(dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << str();
}

}  // namespace curvehedge::cli
