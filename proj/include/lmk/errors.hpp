// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace lmk {

/// Base class for all latentmark errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid configuration value (bad schedule kind, nonsensical sizes, ...).
struct ConfigError : Error {
    using Error::Error;
};

/// A caller violated an operation precondition (shape or length mismatch).
struct ContractError : Error {
    using Error::Error;
};

/// An input left the numeric domain of a formula (division floor, NaN).
struct NumericDomainError : Error {
    using Error::Error;
};

/// A pluggable adapter (external backend, external attack, metric) failed.
struct AdapterError : Error {
    using Error::Error;
};

/// The requested adapter is not registered in this build.
struct AdapterMissingError : AdapterError {
    using AdapterError::AdapterError;
};

/// Training diverged or failed to reach its configured targets.
struct TrainingError : Error {
    explicit TrainingError(const std::string& what, std::string metrics = {})
        : Error(what), final_metrics(std::move(metrics)) {}
    std::string final_metrics;  // summary of the run that failed, for diagnostics
};

/// A resource pool is exhausted (e.g. no payload satisfies the distance floor).
struct CapacityError : Error {
    using Error::Error;
};

/// A persisted file is malformed or has an unexpected version.
struct DataFormatError : Error {
    using Error::Error;
};

}  // namespace lmk
