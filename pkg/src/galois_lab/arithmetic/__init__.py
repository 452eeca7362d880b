from .bernoulli import bernoulli_mod_p, irregular_indices
from .classnumber import imag_quadratic_class_number, quadratic_route_check
from .criteria import check_theorem_conditions, irregular_report
from .scan import scan_exception_table
