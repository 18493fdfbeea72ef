#include "snlevy/shape_report.hpp"

#include <cstdio>

namespace snlevy {

const char* ShapeReport::property_name(Property p) {
    switch (p) {
        case Property::concave: return "concave";
        case Property::convex: return "convex";
        case Property::log_convex: return "log_convex";
        case Property::non_increasing: return "non_increasing";
        case Property::non_decreasing: return "non_decreasing";
        case Property::cm_probe: return "cm_probe";
    }
    return "?";
}

std::string ShapeReport::to_kv() const {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "property=%s interval=[%.17g,%.17g] pass=%d worst_violation=%.17g "
                  "location=%.17g%s%s",
                  property_name(property), lo, hi, pass ? 1 : 0, worst_violation, location,
                  note.empty() ? "" : " note=", note.c_str());
    return buf;
}

std::string ShapeReport::to_row() const {
    char buf[512];
    std::snprintf(buf, sizeof buf, "  %-15s [%9.4g, %9.4g]  %-4s  %12.4e  at %.4g  %s",
                  property_name(property), lo, hi, pass ? "PASS" : "FAIL", worst_violation,
                  location, note.c_str());
    return buf;
}

std::string shape_table(const std::vector<ShapeReport>& reports) {
    std::string out = "  property        interval                ok    worst_violation  location\n";
    for (const auto& r : reports) {
        out += r.to_row();
        out += '\n';
    }
    return out;
}

} // namespace snlevy
