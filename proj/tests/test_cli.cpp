#include <doctest.h>
// populated below
