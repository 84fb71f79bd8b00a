#pragma once

#include <stdexcept>
#include <string>

namespace advmask {

// Exit-code contract: 0 success, 1 internal error, 2 bad input/asset.
enum class ErrorCategory { internal = 1, bad_input = 2 };

class Error : public std::runtime_error {
public:
    Error(std::string code, ErrorCategory category, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)), category_(category) {}

    const std::string& code() const noexcept { return code_; }
    ErrorCategory category() const noexcept { return category_; }
    int exit_code() const noexcept { return static_cast<int>(category_); }

private:
    std::string code_;
    ErrorCategory category_;
};

#define ADVMASK_DEFINE_ERROR(NAME, CATEGORY)                                   \
    class NAME : public Error {                                                \
    public:                                                                    \
        explicit NAME(const std::string& message)                              \
            : Error(#NAME, ErrorCategory::CATEGORY, message) {}                \
    }

ADVMASK_DEFINE_ERROR(InvalidConfig, bad_input);
ADVMASK_DEFINE_ERROR(ShapeMismatch, bad_input);
ADVMASK_DEFINE_ERROR(NoFaceFound, bad_input);
ADVMASK_DEFINE_ERROR(BackendUnavailable, bad_input);
ADVMASK_DEFINE_ERROR(ReconstructionFailed, bad_input);
ADVMASK_DEFINE_ERROR(OutOfFrame, bad_input);
ADVMASK_DEFINE_ERROR(AssetMissing, bad_input);
ADVMASK_DEFINE_ERROR(ZeroVector, bad_input);
ADVMASK_DEFINE_ERROR(EmptyIdentity, bad_input);
ADVMASK_DEFINE_ERROR(MissingIdentity, bad_input);
ADVMASK_DEFINE_ERROR(MixedIdentities, bad_input);
ADVMASK_DEFINE_ERROR(UnknownModel, bad_input);
ADVMASK_DEFINE_ERROR(ChecksumMismatch, bad_input);
ADVMASK_DEFINE_ERROR(EmptyProbeSet, bad_input);
ADVMASK_DEFINE_ERROR(NoDetections, bad_input);
ADVMASK_DEFINE_ERROR(RenderFailure, internal);
ADVMASK_DEFINE_ERROR(NonFiniteLoss, internal);
ADVMASK_DEFINE_ERROR(IoError, bad_input);

#undef ADVMASK_DEFINE_ERROR

}  // namespace advmask
