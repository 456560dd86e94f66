#pragma once

#include <stdexcept>
#include <string>

namespace mint {

// Domain failures. The CLI maps every subclass to exit status 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InsufficientSamples : public Error { public: using Error::Error; };
class DegenerateLabels : public Error { public: using Error::Error; };
class ContractViolation : public Error { public: using Error::Error; };
class DomainError : public Error { public: using Error::Error; };
class ShapeError : public Error { public: using Error::Error; };
class InvalidGrouping : public Error { public: using Error::Error; };
class SamplingError : public Error { public: using Error::Error; };
class TrainingFailure : public Error { public: using Error::Error; };
class IoError : public Error { public: using Error::Error; };
class FormatError : public Error { public: using Error::Error; };
class CorruptionError : public Error { public: using Error::Error; };
class ConfigError : public Error { public: using Error::Error; };

}  // namespace mint
