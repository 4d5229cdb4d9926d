#pragma once

#include <stdexcept>
#include <string>

namespace dephasim {

/// Invalid argument to a model operation (rates, grid sizes, shapes).
class ParameterError : public std::invalid_argument {
public:
    explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

/// Malformed or non-finite input data (tabulated spectra, tables).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Least-squares fit could not be carried out.
class FitError : public std::runtime_error {
public:
    explicit FitError(const std::string& what) : std::runtime_error(what) {}
};

/// An estimator was asked to divide by a vanishing calibration quantity.
class EstimationError : public std::runtime_error {
public:
    explicit EstimationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dephasim
