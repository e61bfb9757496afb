#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cookieaudit {

enum class errc {
    malformed_trace,
    schema_violation,
    invariant_violation,
    unparsable_domain,
    unparsable_url,
    mixed_keys,
    empty_input,
    duplicate_iteration,
    decode_error,
    unknown_category,
    parse_failure,
    degenerate_data,
    empty_eval_set,
    insufficient_data,
    missing_baseline,
    single_region,
    no_traces,
    usage_error,
    io_error,
};

std::string_view to_string(errc code) noexcept;

/// Single exception type for the library; `code()` identifies the failure class.
class audit_error : public std::runtime_error {
public:
    audit_error(errc code, const std::string& message, std::optional<std::size_t> byte_offset = std::nullopt);

    errc code() const noexcept { return code_; }
    /// Set for malformed_trace: offset of the offending byte in the input stream.
    std::optional<std::size_t> byte_offset() const noexcept { return byte_offset_; }

private:
    errc code_;
    std::optional<std::size_t> byte_offset_;
};

}  // namespace cookieaudit
