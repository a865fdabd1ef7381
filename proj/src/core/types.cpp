#include "isf/core/types.hpp"

#include <cmath>

#include "isf/core/bytes.hpp"
#include "isf/core/crc32.hpp"

namespace isf {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::BadMagic: return "BadMagic";
        case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::ChecksumMismatch: return "ChecksumMismatch";
        case ErrorCode::SerializationFailed: return "SerializationFailed";
        case ErrorCode::ConnectFailed: return "ConnectFailed";
        case ErrorCode::VersionMismatch: return "VersionMismatch";
        case ErrorCode::InvalidCapacity: return "InvalidCapacity";
        case ErrorCode::ReaderGone: return "ReaderGone";
        case ErrorCode::WriterGone: return "WriterGone";
        case ErrorCode::StagingError: return "StagingError";
        case ErrorCode::CalibrationFailed: return "CalibrationFailed";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::UnknownCodec: return "UnknownCodec";
        case ErrorCode::DegenerateRange: return "DegenerateRange";
        case ErrorCode::InvalidCadence: return "InvalidCadence";
        case ErrorCode::DegenerateSamples: return "DegenerateSamples";
        case ErrorCode::TaskFailed: return "TaskFailed";
        case ErrorCode::ConsumerCrashed: return "ConsumerCrashed";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "UnknownError";
}

Field::Field(std::uint32_t E, std::uint32_t P, std::uint32_t comps, std::vector<double> vals,
             double domain)
    : elements_per_axis(E),
      points_per_element_axis(P),
      components(comps),
      domain_length(domain),
      values(std::move(vals)) {
    validate();
}

Field Field::zeros(std::uint32_t E, std::uint32_t P, std::uint32_t comps, double domain) {
    Field f;
    f.elements_per_axis = E;
    f.points_per_element_axis = P;
    f.components = comps;
    f.domain_length = domain;
    f.values.assign(static_cast<std::size_t>(f.value_count()), 0.0);
    f.validate();
    return f;
}

void Field::validate() const {
    if (elements_per_axis < 1)
        throw Error(ErrorCode::InvalidArgument, "Field: elements_per_axis must be >= 1");
    if (points_per_element_axis < 2)
        throw Error(ErrorCode::InvalidArgument, "Field: points_per_element_axis must be >= 2");
    if (components != 1 && components != 3)
        throw Error(ErrorCode::InvalidArgument, "Field: components must be 1 or 3");
    if (!(domain_length > 0.0))
        throw Error(ErrorCode::InvalidArgument, "Field: domain_length must be positive");
    if (values.size() != value_count())
        throw Error(ErrorCode::InvalidArgument,
                    "Field: values length " + std::to_string(values.size()) + " != expected " +
                        std::to_string(value_count()));
    for (double v : values)
        if (!std::isfinite(v))
            throw Error(ErrorCode::InvalidArgument, "Field: non-finite value");
}

double Field::at_grid(std::uint32_t gx, std::uint32_t gy, std::uint32_t gz, std::uint32_t c) const {
    const std::uint32_t P = points_per_element_axis;
    const std::uint32_t E = elements_per_axis;
    const std::uint64_t ex = gx / P, px = gx % P;
    const std::uint64_t ey = gy / P, py = gy % P;
    const std::uint64_t ez = gz / P, pz = gz % P;
    const std::uint64_t element = ex + static_cast<std::uint64_t>(E) * (ey + static_cast<std::uint64_t>(E) * ez);
    const std::uint64_t point = px + static_cast<std::uint64_t>(P) * (py + static_cast<std::uint64_t>(P) * pz);
    return values[index_of(element, point, c)];
}

StepPayload StepPayload::make(std::uint64_t step_index, double sim_time, Field field) {
    StepPayload p;
    p.step_index = step_index;
    p.sim_time = sim_time;
    p.field = std::move(field);
    p.checksum = crc32_ieee(as_bytes_span(p.field.values));
    return p;
}

ResourcePlan::ResourcePlan(int p_t, int p_o, int p_i)
    : total_workers(p_t), producer_workers(p_o), insitu_workers(p_i) {
    if (p_t < 1) throw Error(ErrorCode::InvalidArgument, "ResourcePlan: total_workers must be >= 1");
    if (p_o < 1) throw Error(ErrorCode::InvalidArgument, "ResourcePlan: producer_workers must be >= 1");
    if (p_i < 0) throw Error(ErrorCode::InvalidArgument, "ResourcePlan: insitu_workers must be >= 0");
    if (p_o + p_i != p_t)
        throw Error(ErrorCode::InvalidArgument,
                    "ResourcePlan: producer_workers + insitu_workers != total_workers (" +
                        std::to_string(p_o) + " + " + std::to_string(p_i) +
                        " != " + std::to_string(p_t) + ")");
}

const char* to_string(WorkflowMode mode) {
    switch (mode) {
        case WorkflowMode::Synchronous: return "sync";
        case WorkflowMode::Asynchronous: return "async";
        case WorkflowMode::Hybrid: return "hybrid";
    }
    return "?";
}

WorkflowMode workflow_mode_from_string(const std::string& s) {
    if (s == "sync" || s == "synchronous") return WorkflowMode::Synchronous;
    if (s == "async" || s == "asynchronous") return WorkflowMode::Asynchronous;
    if (s == "hybrid") return WorkflowMode::Hybrid;
    throw Error(ErrorCode::InvalidArgument, "unknown workflow mode '" + s + "'");
}

StepTiming& TimingReport::step_record(std::uint64_t step) {
    for (auto& r : steps)
        if (r.step == step) return r;
    steps.push_back(StepTiming{step, 0.0, 0.0, 0.0});
    return steps.back();
}

} // namespace isf
