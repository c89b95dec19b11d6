#ifndef GRAPHNLS_ERRORS_HPP
#define GRAPHNLS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace graphnls {

// Error categories map onto the CLI exit codes: config-class -> 2,
// numeric -> 3, io -> 4.
enum class errc {
    config,       // bad key, type mismatch, constraint violation
    invalid_spec, // graph spec violates an invariant
    domain,       // argument outside an operation's domain
    numeric,      // iteration failed, NaN, lost path
    io            // filesystem problems
};

class error : public std::runtime_error {
  public:
    error(errc kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    errc kind() const { return kind_; }

  private:
    errc kind_;
};

[[noreturn]] inline void fail(errc kind, const std::string& what) { throw error(kind, what); }

} // namespace graphnls

#endif
