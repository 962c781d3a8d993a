#include "sdc/error.hpp"

namespace sdc {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::EmptySignal: return "EmptySignal";
        case ErrorKind::InvalidFactor: return "InvalidFactor";
        case ErrorKind::UnsupportedWav: return "UnsupportedWav";
        case ErrorKind::MalformedWav: return "MalformedWav";
        case ErrorKind::RateMismatch: return "RateMismatch";
        case ErrorKind::SignalTooShort: return "SignalTooShort";
        case ErrorKind::ShapeMismatch: return "ShapeMismatch";
        case ErrorKind::UndefinedReference: return "UndefinedReference";
        case ErrorKind::NotAScalar: return "NotAScalar";
        case ErrorKind::StaleGraph: return "StaleGraph";
        case ErrorKind::InvalidConfig: return "InvalidConfig";
        case ErrorKind::InvalidToken: return "InvalidToken";
        case ErrorKind::NanLoss: return "NanLoss";
        case ErrorKind::NoData: return "NoData";
        case ErrorKind::IncompleteBreakdown: return "IncompleteBreakdown";
        case ErrorKind::ConfigMismatch: return "ConfigMismatch";
        case ErrorKind::IoError: return "IoError";
        case ErrorKind::CorruptStream: return "CorruptStream";
    }
    return "Unknown";
}

}  // namespace sdc
