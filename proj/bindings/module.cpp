#include <pybind11/pybind11.h>
PYBIND11_MODULE(_cle_core, m) { m.doc() = "cle_sim core"; }
