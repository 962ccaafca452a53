#pragma once
// Exception hierarchy. Kind maps onto CLI exit codes.
#include <stdexcept>
#include <string>

namespace vmb {

enum class ErrorKind { validation, numerical, io };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(ErrorKind::validation, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ErrorKind::numerical, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

#define VMB_DEFINE_ERROR(Name, Base)                                  \
  class Name : public Base {                                          \
   public:                                                            \
    explicit Name(const std::string& what) : Base(#Name ": " + what) {} \
  }

VMB_DEFINE_ERROR(InvalidArgument, ValidationError);
VMB_DEFINE_ERROR(MissingKey, ValidationError);
VMB_DEFINE_ERROR(TypeMismatch, ValidationError);
VMB_DEFINE_ERROR(SchemaVersion, ValidationError);
VMB_DEFINE_ERROR(UnknownKey, ValidationError);

VMB_DEFINE_ERROR(NonOrthogonalRHS, NumericalError);
VMB_DEFINE_ERROR(SingularOperator, NumericalError);
VMB_DEFINE_ERROR(AssemblyFailure, NumericalError);
VMB_DEFINE_ERROR(CFLViolation, NumericalError);
VMB_DEFINE_ERROR(NonFinite, NumericalError);
VMB_DEFINE_ERROR(SamplingMismatch, NumericalError);

#undef VMB_DEFINE_ERROR

inline int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::validation: return 1;
    case ErrorKind::numerical: return 2;
    case ErrorKind::io: return 3;
  }
  return 2;
}

}  // namespace vmb
