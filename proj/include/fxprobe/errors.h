#pragma once

#include <stdexcept>
#include <string>

namespace fxprobe {

/// Base for every error raised by the library. `kind()` is a stable short
/// tag used in CLI diagnostics and failure summaries.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
    virtual const char* kind() const noexcept = 0;
};

#define FXPROBE_DECLARE_ERROR(Name, tag)                                  \
    class Name : public Error {                                            \
    public:                                                                \
        explicit Name(const std::string& what) : Error(what) {}            \
        const char* kind() const noexcept override { return tag; }         \
    };

FXPROBE_DECLARE_ERROR(FormatError, "format")
FXPROBE_DECLARE_ERROR(UnsupportedError, "unsupported")
FXPROBE_DECLARE_ERROR(IoError, "io")
FXPROBE_DECLARE_ERROR(ValidationError, "validation")
FXPROBE_DECLARE_ERROR(ConfigError, "config")
FXPROBE_DECLARE_ERROR(LengthError, "length")
FXPROBE_DECLARE_ERROR(DimensionError, "dimension")
FXPROBE_DECLARE_ERROR(DataError, "data")
FXPROBE_DECLARE_ERROR(CorruptionError, "corruption")
FXPROBE_DECLARE_ERROR(DivergenceError, "divergence")
FXPROBE_DECLARE_ERROR(SilenceError, "silence")

#undef FXPROBE_DECLARE_ERROR

/// True for errors caused by bad user input (config, parameters); the CLI
/// maps these to exit code 1 and everything else to 2.
inline bool is_validation_error(const Error& e) {
    const std::string k = e.kind();
    return k == "validation" || k == "config";
}

}  // namespace fxprobe
