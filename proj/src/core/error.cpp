#include "palmgrid/error.hpp"

namespace palmgrid {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::format: return "format";
    case ErrorKind::truncation: return "truncation";
    case ErrorKind::io: return "io";
    case ErrorKind::config: return "config";
    case ErrorKind::schema: return "schema";
    case ErrorKind::argument: return "argument";
    case ErrorKind::shape: return "shape";
    case ErrorKind::capacity: return "capacity";
    case ErrorKind::parse: return "parse";
    case ErrorKind::divergence: return "divergence";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::degenerate_input: return "degenerate_input";
    case ErrorKind::unsupported: return "unsupported";
    }
    return "unknown";
}

} // namespace palmgrid
