#pragma once

#include <string>
#include <vector>

namespace snlevy {

// Result of a numerical shape certification over an interval.  Violations are
// positive by convention: `pass` holds exactly when worst_violation <= 0 (the
// tolerance is already folded into the defect).
struct ShapeReport {
    enum class Property {
        concave,
        convex,
        log_convex,
        non_increasing,
        non_decreasing,
        cm_probe
    };

    Property property{};
    double lo = 0.0, hi = 0.0;   // certified interval
    bool pass = false;
    double worst_violation = 0.0;
    double location = 0.0;       // grid point of the worst defect
    std::string note;

    // machine-readable key=value block (one line)
    std::string to_kv() const;
    // human table row
    std::string to_row() const;

    static const char* property_name(Property p);
};

std::string shape_table(const std::vector<ShapeReport>& reports);

} // namespace snlevy
