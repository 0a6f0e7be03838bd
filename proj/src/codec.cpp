#include "pagelab/codec.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace pagelab
{

namespace
{

constexpr std::array<char, 4> kTraceMagic{'3', 'P', 'O', 'T'};
constexpr std::array<char, 4> kTapeMagic{'3', 'P', 'O', 'P'};

template <typename T>
void put(std::ostream & out, T value)
{
    std::array<char, sizeof(T)> bytes{};
    for (std::size_t i = 0; i < sizeof(T); ++i)
        bytes[i] = static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xff);
    out.write(bytes.data(), bytes.size());
}

template <typename T>
T get(std::istream & in)
{
    std::array<unsigned char, sizeof(T)> bytes{};
    if (!in.read(reinterpret_cast<char *>(bytes.data()), bytes.size()))
        throw FormatError("unexpected end of file");
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
        v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    return static_cast<T>(v);
}

void expect_magic(std::istream & in, std::array<char, 4> const & magic)
{
    std::array<char, 4> got{};
    if (!in.read(got.data(), got.size()) || got != magic)
        throw FormatError("bad magic, expected \"" + std::string(magic.data(), magic.size()) + "\"");
}

void expect_version(std::istream & in, std::uint32_t expected)
{
    auto version = get<std::uint32_t>(in);
    if (version != expected)
        throw FormatError("unsupported format version " + std::to_string(version));
}

void check_stream(std::ostream & out)
{
    if (!out)
        throw std::runtime_error("write failed");
}

} // namespace

void write_trace(std::ostream & out, Trace const & trace)
{
    out.write(kTraceMagic.data(), kTraceMagic.size());
    put<std::uint32_t>(out, kTraceFormatVersion);
    put<std::uint32_t>(out, trace.microset_size);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(trace.thread_count()));
    for (auto const & thread : trace.per_thread) {
        put<std::uint64_t>(out, thread.size());
        for (auto const & ms : thread) {
            put<std::uint32_t>(out, static_cast<std::uint32_t>(ms.size()));
            for (auto page : ms)
                put<std::uint64_t>(out, page.value);
        }
    }
    check_stream(out);
}

TraceReader::TraceReader(std::istream & in)
    : in_(in)
{
    expect_magic(in_, kTraceMagic);
    expect_version(in_, kTraceFormatVersion);
    microset_size_ = get<std::uint32_t>(in_);
    thread_count_ = get<std::uint32_t>(in_);
    if (microset_size_ == 0)
        throw FormatError("trace declares a zero microset size");
}

bool TraceReader::next_thread()
{
    Microset skip;
    while (microsets_left_ > 0)
        next_microset(skip);
    if (threads_started_ == thread_count_)
        return false;
    ++threads_started_;
    microsets_left_ = get<std::uint64_t>(in_);
    return true;
}

bool TraceReader::next_microset(Microset & out)
{
    if (microsets_left_ == 0)
        return false;
    --microsets_left_;
    auto len = get<std::uint32_t>(in_);
    if (len == 0 || len > microset_size_)
        throw FormatError("microset length out of range");
    out.resize(len);
    for (auto & page : out)
        page = PageId{get<std::uint64_t>(in_)};
    return true;
}

Trace read_trace(std::istream & in)
{
    TraceReader reader(in);
    Trace trace;
    trace.microset_size = reader.microset_size();
    while (reader.next_thread()) {
        auto & thread = trace.per_thread.emplace_back();
        Microset ms;
        while (reader.next_microset(ms)) {
            trace.fault_count += ms.size();
            thread.push_back(ms);
        }
    }
    return trace;
}

void write_tape(std::ostream & out, Tape const & tape)
{
    out.write(kTapeMagic.data(), kTapeMagic.size());
    put<std::uint32_t>(out, kTapeFormatVersion);
    put<std::uint64_t>(out, tape.target_pages);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(tape.thread_count()));
    for (auto const & thread : tape.per_thread) {
        put<std::uint64_t>(out, thread.size());
        for (auto page : thread)
            put<std::uint64_t>(out, page.value);
    }
    check_stream(out);
}

Tape read_tape(std::istream & in)
{
    expect_magic(in, kTapeMagic);
    expect_version(in, kTapeFormatVersion);
    Tape tape;
    tape.target_pages = get<std::uint64_t>(in);
    auto threads = get<std::uint32_t>(in);
    tape.per_thread.resize(threads);
    for (auto & thread : tape.per_thread) {
        auto len = get<std::uint64_t>(in);
        for (std::uint64_t i = 0; i < len; ++i)
            thread.push_back(PageId{get<std::uint64_t>(in)});
    }
    return tape;
}

namespace
{

std::ifstream open_in(std::string const & path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open '" + path + "' for reading");
    return in;
}

std::ofstream open_out(std::string const & path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    return out;
}

} // namespace

void save_trace(std::string const & path, Trace const & trace)
{
    auto out = open_out(path);
    write_trace(out, trace);
}

Trace load_trace(std::string const & path)
{
    auto in = open_in(path);
    return read_trace(in);
}

void save_tape(std::string const & path, Tape const & tape)
{
    auto out = open_out(path);
    write_tape(out, tape);
}

Tape load_tape(std::string const & path)
{
    auto in = open_in(path);
    return read_tape(in);
}

void dump_trace(std::ostream & out, Trace const & trace)
{
    out << "trace microset_size=" << trace.microset_size
        << " threads=" << trace.thread_count()
        << " faults=" << trace.fault_count << '\n';
    for (std::size_t t = 0; t < trace.thread_count(); ++t) {
        auto const & thread = trace.per_thread[t];
        out << "thread " << t << " microsets=" << thread.size() << '\n';
        for (std::size_t m = 0; m < thread.size(); ++m) {
            out << t << ' ' << m << ':';
            for (auto page : thread[m])
                out << ' ' << page.value;
            out << '\n';
        }
    }
}

Tape postprocess_stream(std::istream & trace_in, std::uint64_t target_pages)
{
    if (target_pages == 0)
        throw InvalidParameter("target memory must be at least 1 page");
    TraceReader reader(trace_in);
    Tape tape;
    tape.target_pages = target_pages;
    tape.microset_size = reader.microset_size();
    auto capacity = per_thread_capacity(target_pages, std::max<std::uint32_t>(1, reader.thread_count()));
    Microset ms;
    while (reader.next_thread()) {
        LruFilter lru(capacity);
        auto & out = tape.per_thread.emplace_back();
        while (reader.next_microset(ms)) {
            for (auto page : ms) {
                if (lru.access(page))
                    out.push_back(page);
            }
        }
    }
    return tape;
}

} // namespace pagelab
