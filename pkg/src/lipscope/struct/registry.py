"""A script containing a generic implementation of a registry system,
used to look up named components such as activation functions.
"""

from typing import TypeVar, Dict, Generic, List

RegistryObject = TypeVar('RegistryObject')
"""The type of the values in a registry."""

class Registry(Dict[str, RegistryObject], Generic[RegistryObject]):
    """A string key to value bidirectional dictionary.

    Types
    -----
    RegistryObject
        The type of the values in the registry.
    """

    def __init__(self, kind: str) -> None:
        """
        Parameters
        ----------
        kind : str
            A human-readable name for the values, used in error messages.
        """
        super().__init__()
        self.kind: str = kind
        self.__inverse: Dict[RegistryObject, str] = {}

    def __setitem__(self, __key: str, __value: RegistryObject) -> None:
        # Keys and values are both unique
        if __key in self:
            raise ValueError(f'{__key} already has a registered {self.kind}.')
        if __value in self.__inverse:
            raise ValueError(f'{__value} cannot be assigned to {__key} '
                + f'as it already exists for {self.get_key(__value)}.')

        super().__setitem__(__key, __value)
        self.__inverse[__value] = __key

    def __missing__(self, __key: str) -> RegistryObject:
        raise KeyError(f'Unknown {self.kind} \'{__key}\'; '
            + f'expected one of: {", ".join(self.names())}')

    def get_key(self, __value: RegistryObject) -> str:
        """Gets the key from the value.

        Parameters
        ----------
        __value : RegistryObject
            The value to get the key of.

        Return
        ------
        str
            The key of the value.
        """
        return self.__inverse[__value]

    def names(self) -> List[str]:
        """Returns the registered keys in registration order.

        Returns
        -------
        list of str
            The registered keys.
        """
        return list(self.keys())
