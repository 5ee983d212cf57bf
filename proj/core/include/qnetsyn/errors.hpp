#pragma once

#include <stdexcept>

namespace qnetsyn {

// Base class of every error thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Operands or matrix blocks have incompatible shapes.
struct DimensionError : Error {
    using Error::Error;
};

// Duplicate port label where uniqueness is required.
struct LabelError : Error {
    using Error::Error;
};

// A named port does not exist in the model.
struct UnknownPort : Error {
    using Error::Error;
};

// An edge pairs ports of different multiplicity.
struct MultiplicityMismatch : Error {
    using Error::Error;
};

// The connection matrix of an edge elimination is (numerically) singular.
struct SingularConnection : Error {
    using Error::Error;
};

// A coupling choice with S_jk * S_kj too close to 1.
struct DegenerateScattering : Error {
    using Error::Error;
};

// Adjacency matrix does not describe a valid channel pairing.
struct InconsistentAdjacency : Error {
    using Error::Error;
};

// Passive synthesis was requested for a non-passive target.
struct NotPassive : Error {
    using Error::Error;
};

// A netlist block produced for a passive target failed the structural
// passivity scan. Signals a library bug, not a user error.
struct PassivityBroken : Error {
    using Error::Error;
};

// Netlist digest does not match the target it is verified against.
struct HashMismatch : Error {
    using Error::Error;
};

// Malformed or out-of-schema JSON input.
struct SchemaError : Error {
    using Error::Error;
};

} // namespace qnetsyn
