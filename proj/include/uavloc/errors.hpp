#pragma once

#include <stdexcept>
#include <string>

namespace uavloc {

/// Thrown when a candidate geometry places the receiver closer than
/// d_min to a (virtual) base station, where the path loss model diverges.
class DegenerateGeometryError : public std::runtime_error {
public:
    DegenerateGeometryError(double distance_m, double d_min_m)
        : std::runtime_error("degenerate geometry: distance " +
                             std::to_string(distance_m) + " m below minimum " +
                             std::to_string(d_min_m) + " m"),
          distance_m(distance_m),
          d_min_m(d_min_m) {}

    double distance_m;
    double d_min_m;
};

/// Thrown when the Fisher information matrix is numerically singular.
class SingularFisherError : public std::runtime_error {
public:
    explicit SingularFisherError(double condition)
        : std::runtime_error("Fisher matrix is numerically singular (cond = " +
                             std::to_string(condition) + ")"),
          condition(condition) {}

    double condition;
};

/// Thrown on scenario file schema violations; carries the offending field.
class SchemaError : public std::runtime_error {
public:
    SchemaError(std::string field_name, const std::string& message)
        : std::runtime_error("scenario field '" + field_name + "': " + message),
          field(std::move(field_name)) {}

    std::string field;
};

}  // namespace uavloc
