#include "smlab/errors.hpp"

namespace smlab {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidStochasticMatrix: return "InvalidStochasticMatrix";
    case ErrorKind::MissingSojournLaw: return "MissingSojournLaw";
    case ErrorKind::InvalidKernel: return "InvalidKernel";
    case ErrorKind::InvalidSojournLaw: return "InvalidSojournLaw";
    case ErrorKind::NotIrreducible: return "NotIrreducible";
    case ErrorKind::PeriodicChain: return "PeriodicChain";
    case ErrorKind::HorizonExceeded: return "HorizonExceeded";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::TooFewSamples: return "TooFewSamples";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::SchemaError: return "SchemaError";
  }
  return "Error";
}

}  // namespace smlab
