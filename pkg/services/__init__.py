"""
fanforge - Services Package
Core matroid services: fans and fan-extensions, wheel gluing, fragility
checks and bounded-depth certification.
"""

from .certifier import CertifierService, CertResult, CertTask
from .exceptions import FanforgeError, HypothesisError, InputError, ResourceAbort, StructuralError
from .fans import FanExtensionService, FanFamily
from .fields_repr import GF, ReprMatroid
from .fragility import ClassPredicate, FragilityService, MinorSet
from .matroid_core import Matroid

__all__ = [
    'CertifierService', 'CertResult', 'CertTask',
    'FanforgeError', 'HypothesisError', 'InputError', 'ResourceAbort', 'StructuralError',
    'FanExtensionService', 'FanFamily',
    'GF', 'ReprMatroid',
    'ClassPredicate', 'FragilityService', 'MinorSet',
    'Matroid',
]
