#include "cookieaudit/error.hpp"

namespace cookieaudit {

std::string_view to_string(errc code) noexcept {
    switch (code) {
        case errc::malformed_trace: return "MalformedTrace";
        case errc::schema_violation: return "SchemaViolation";
        case errc::invariant_violation: return "InvariantViolation";
        case errc::unparsable_domain: return "UnparsableDomain";
        case errc::unparsable_url: return "UnparsableUrl";
        case errc::mixed_keys: return "MixedKeys";
        case errc::empty_input: return "EmptyInput";
        case errc::duplicate_iteration: return "DuplicateIteration";
        case errc::decode_error: return "DecodeError";
        case errc::unknown_category: return "UnknownCategory";
        case errc::parse_failure: return "ParseFailure";
        case errc::degenerate_data: return "DegenerateData";
        case errc::empty_eval_set: return "EmptyEvalSet";
        case errc::insufficient_data: return "InsufficientData";
        case errc::missing_baseline: return "MissingBaseline";
        case errc::single_region: return "SingleRegion";
        case errc::no_traces: return "NoTraces";
        case errc::usage_error: return "UsageError";
        case errc::io_error: return "IoError";
    }
    return "Unknown";
}

audit_error::audit_error(errc code, const std::string& message, std::optional<std::size_t> byte_offset)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), byte_offset_(byte_offset) {}

}  // namespace cookieaudit
