#ifndef PAGELAB_PAGE_HPP
#define PAGELAB_PAGE_HPP

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>

namespace pagelab
{

/// Index of a 4 KiB page in a flat virtual page space.
struct PageId
{
    std::uint64_t value = 0;

    friend constexpr auto operator<=>(PageId, PageId) = default;
};

inline std::ostream & operator<<(std::ostream & os, PageId page)
{
    return os << page.value;
}

constexpr std::uint64_t kPageBytes = 4096;

/// A caller-supplied parameter is outside its domain.
class InvalidParameter : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// A trace or tape file is malformed, truncated or of the wrong version.
class FormatError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// The simulator's internal audit found a violated invariant.
class AuditFailure : public std::logic_error
{
public:
    using std::logic_error::logic_error;
};

} // namespace pagelab

template <>
struct std::hash<pagelab::PageId>
{
    std::size_t operator()(pagelab::PageId page) const noexcept
    {
        // splitmix64 finalizer; sequential page ids hash poorly with identity
        std::uint64_t z = page.value + 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return static_cast<std::size_t>(z ^ (z >> 31));
    }
};

#endif // PAGELAB_PAGE_HPP
