#include "hk/errors.hpp"

namespace hk {

const char* error_kind_name(ErrorKind k) {
    switch (k) {
    case ErrorKind::Argument: return "argument error";
    case ErrorKind::Configuration: return "configuration error";
    case ErrorKind::Index: return "index error";
    case ErrorKind::Selection: return "selection error";
    case ErrorKind::Classification: return "classification error";
    case ErrorKind::Branch: return "branch error";
    case ErrorKind::Schedule: return "schedule error";
    case ErrorKind::Integrator: return "integrator error";
    case ErrorKind::Stratification: return "stratification error";
    case ErrorKind::SlidingInfeasible: return "sliding infeasible";
    case ErrorKind::NotConverged: return "not converged";
    case ErrorKind::Sampling: return "sampling error";
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::Io: return "io error";
    }
    return "error";
}

}  // namespace hk
