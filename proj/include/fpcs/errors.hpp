#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace fpcs {

// Common base for all library errors. `code()` is a stable machine-readable
// identifier; the CLI maps it into JSON error reports and exit codes.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

#define FPCS_ERROR_TYPE(Name)                                        \
    class Name : public Error {                                      \
    public:                                                          \
        explicit Name(const std::string& what = #Name)               \
            : Error(#Name, what) {}                                  \
    }

FPCS_ERROR_TYPE(NonFinite);
FPCS_ERROR_TYPE(NoConvergence);
FPCS_ERROR_TYPE(EmptyPolyhedron);
FPCS_ERROR_TYPE(EmptyIntersection);
FPCS_ERROR_TYPE(DimensionMismatch);
FPCS_ERROR_TYPE(HorizonMismatch);
FPCS_ERROR_TYPE(DriftInconsistency);
FPCS_ERROR_TYPE(ZenoGuard);
FPCS_ERROR_TYPE(BadParams);
FPCS_ERROR_TYPE(NotLowDimensional);
FPCS_ERROR_TYPE(NotCritical);
FPCS_ERROR_TYPE(DuplicateVectors);
FPCS_ERROR_TYPE(ScaleLimit);
FPCS_ERROR_TYPE(SchemaError);

#undef FPCS_ERROR_TYPE

}  // namespace fpcs
