#include "density/common/error.hpp"

namespace density {

const char* to_string(ErrorCategory c) {
    switch (c) {
        case ErrorCategory::Config: return "config";
        case ErrorCategory::Io: return "io";
        case ErrorCategory::Shape: return "shape";
        case ErrorCategory::Data: return "data";
        case ErrorCategory::Numeric: return "numeric";
        case ErrorCategory::Degenerate: return "degenerate";
    }
    return "unknown";
}

}  // namespace density
