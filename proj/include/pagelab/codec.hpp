#ifndef PAGELAB_CODEC_HPP
#define PAGELAB_CODEC_HPP

#include "pagelab/tape.hpp"
#include "pagelab/tracer.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>

namespace pagelab
{

/*
 * Little-endian binary containers.
 *
 * Trace ("3POT"):
 *   magic[4] | version u32 | microset_size u32 | thread_count u32
 *   per thread: microset_count u64
 *     per microset: length u32 | length x page u64
 *
 * Tape ("3POP"):
 *   magic[4] | version u32 | target_pages u64 | thread_count u32
 *   per thread: length u64 | length x page u64
 */
inline constexpr std::uint32_t kTraceFormatVersion = 1;
inline constexpr std::uint32_t kTapeFormatVersion = 1;

void write_trace(std::ostream & out, Trace const & trace);
Trace read_trace(std::istream & in);

void write_tape(std::ostream & out, Tape const & tape);
Tape read_tape(std::istream & in);

void save_trace(std::string const & path, Trace const & trace);
Trace load_trace(std::string const & path);
void save_tape(std::string const & path, Tape const & tape);
Tape load_tape(std::string const & path);

/// Line-oriented text rendering of a trace.
void dump_trace(std::ostream & out, Trace const & trace);

/*
 * Sequential reader over a trace file. Holds at most one microset in
 * memory, so post-processing a file needs only the LRU state.
 */
class TraceReader
{
public:
    explicit TraceReader(std::istream & in);

    std::uint32_t microset_size() const { return microset_size_; }
    std::uint32_t thread_count() const { return thread_count_; }

    /// Advances to the next thread section; false once all are consumed.
    bool next_thread();

    /// Reads the next microset of the current thread; false at its end.
    bool next_microset(Microset & out);

private:
    std::istream & in_;
    std::uint32_t microset_size_ = 0;
    std::uint32_t thread_count_ = 0;
    std::uint32_t threads_started_ = 0;
    std::uint64_t microsets_left_ = 0;
};

/// Post-processes a trace file section by section without materializing it.
Tape postprocess_stream(std::istream & trace_in, std::uint64_t target_pages);

} // namespace pagelab

#endif // PAGELAB_CODEC_HPP
