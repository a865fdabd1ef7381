#pragma once

// Domain types shared by every module: fields on an element-structured periodic
// grid, step payloads, resource plans, workflow modes and timing reports.

#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "isf/core/errors.hpp"

namespace isf {

/// Slack allowed on every wall-clock inequality (OS timer jitter).
inline constexpr double kTimerSlackS = 1e-3;

inline constexpr double kDefaultDomainLength = 2.0 * std::numbers::pi;

/// Dense scalar or vector samples on an E^3 grid of elements, each element
/// holding P^3 points. Storage is element-major, then point-major, then
/// component-major:
///   index = (element * P^3 + point) * components + component
/// with element = ex + E*(ey + E*ez) and point = px + P*(py + P*pz).
struct Field {
    std::uint32_t elements_per_axis = 0;        // E
    std::uint32_t points_per_element_axis = 0;  // P
    std::uint32_t components = 0;               // 1 or 3
    double domain_length = kDefaultDomainLength;
    std::vector<double> values;

    Field() = default;
    Field(std::uint32_t E, std::uint32_t P, std::uint32_t comps, std::vector<double> vals,
          double domain = kDefaultDomainLength);

    /// All-zero field of the given shape.
    static Field zeros(std::uint32_t E, std::uint32_t P, std::uint32_t comps,
                       double domain = kDefaultDomainLength);

    std::uint64_t element_count() const {
        auto e = static_cast<std::uint64_t>(elements_per_axis);
        return e * e * e;
    }
    std::uint64_t points_per_element() const {
        auto p = static_cast<std::uint64_t>(points_per_element_axis);
        return p * p * p;
    }
    std::uint64_t value_count() const { return element_count() * points_per_element() * components; }
    std::uint32_t points_per_axis() const { return elements_per_axis * points_per_element_axis; }

    std::uint64_t index_of(std::uint64_t element, std::uint64_t point, std::uint32_t component) const {
        return (element * points_per_element() + point) * components + component;
    }

    /// Value at global grid coordinates (gx, gy, gz in [0, E*P)) for one component.
    double at_grid(std::uint32_t gx, std::uint32_t gy, std::uint32_t gz, std::uint32_t c) const;

    /// Throws InvalidArgument if shape/length/finiteness invariants are violated.
    void validate() const;

    bool same_shape(const Field& other) const {
        return elements_per_axis == other.elements_per_axis &&
               points_per_element_axis == other.points_per_element_axis &&
               components == other.components;
    }
};

/// A versioned snapshot of a field at one simulation step. The checksum is the
/// IEEE CRC-32 of the field's value bytes as they appear in the wire payload.
struct StepPayload {
    std::uint64_t step_index = 0;
    double sim_time = 0.0;
    Field field;
    std::uint32_t checksum = 0;

    static StepPayload make(std::uint64_t step_index, double sim_time, Field field);
};

/// Worker split for a workflow run: producer_workers + insitu_workers == total_workers.
struct ResourcePlan {
    int total_workers = 1;     // p_t
    int producer_workers = 1;  // p_o
    int insitu_workers = 0;    // p_i

    ResourcePlan() = default;
    ResourcePlan(int p_t, int p_o, int p_i);
};

enum class WorkflowMode { Synchronous, Asynchronous, Hybrid };

const char* to_string(WorkflowMode mode);
WorkflowMode workflow_mode_from_string(const std::string& s);

struct StepTiming {
    std::uint64_t step = 0;
    double producer_compute_s = 0.0;
    double handoff_s = 0.0;
    double insitu_s = 0.0;
};

/// Per-phase wall-clock breakdown of one run. Producer time is everything up
/// to the handoff-return instant; in-situ time starts there.
struct TimingReport {
    std::vector<StepTiming> steps;

    double total_wall_s = 0.0;
    double producer_total_s = 0.0;            // compute + handoff
    double insitu_total_s = 0.0;              // task-chain execution (incl. hybrid sync prefix)
    double overhead_first_noverlap_s = 0.0;   // run start -> first handoff complete
    double overhead_last_noverlap_s = 0.0;    // in-situ tail after the producer finished
    double overhead_comm_total_s = 0.0;       // cumulative handoff time

    StepTiming& step_record(std::uint64_t step);
};

} // namespace isf
