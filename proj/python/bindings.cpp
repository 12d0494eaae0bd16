#include <pybind11/pybind11.h>

PYBIND11_MODULE(ctms_core, m) { m.doc() = "placeholder"; }
