#ifndef BSPEC_EXEC_HPP
#define BSPEC_EXEC_HPP

namespace bspec {

// Execution policy for the data-parallel kernels (spectrum build, pairwise
// phase-distance scans).  `serial` is the reference implementation kept for
// testing; `parallel` is the OpenMP path.  Both must produce identical
// results; bench/ compares their wall time.
enum class Exec { serial, parallel };

}

#endif
