#ifndef OUTWAVE_ERRORS_HPP
#define OUTWAVE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace outwave
{
    /// Base of every error thrown by the library.
    class Error : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    /// Invalid parameters (grid too coarse, bad exponent, inconsistent config).
    class ConfigError : public Error
    {
    public:
        using Error::Error;
    };

    /// The field (or a propagating front) reached the outer edge of the grid.
    class SupportOverflow : public Error
    {
    public:
        using Error::Error;
    };

    /// A field is nonzero where it is required to vanish.
    class SupportViolation : public Error
    {
    public:
        using Error::Error;
    };

    /// u/r is unbounded at the origin because u(0) != 0.
    class OriginSingularity : public Error
    {
    public:
        using Error::Error;
    };

    /// A time that is not an integer multiple of the grid spacing.
    class TimeAlignmentError : public Error
    {
    public:
        using Error::Error;
    };

    /// Non-finite values or values above the blow-up sentinel.
    class BlowUp : public Error
    {
    public:
        using Error::Error;
    };

    /// Diagnostics history with missing or non-uniformly spaced checkpoints.
    class RaggedHistory : public Error
    {
    public:
        using Error::Error;
    };
} // namespace outwave

#endif
