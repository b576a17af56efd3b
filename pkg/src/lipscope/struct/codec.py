"""A script containing a generic implementation of an encoder and decoder
between an object, a dictionary, and its JSON text.
"""

import json
from abc import ABC, abstractmethod
from typing import TypeVar, Type, Dict, Any, Generic

DataObject = TypeVar('DataObject')
"""The type of the object holding data."""

DictObject: Type[Dict[str, Any]] = Dict[str, Any]
"""A generic intermediate object for reading or writing to a file."""

class DictCodec(ABC, Generic[DataObject]):
    """An abstract, generic encoder and decoder between a dictionary and a data object.

    Types
    -----
    DataObject
        The type of the data object to be encoded or decoded to.
    """

    @abstractmethod
    def decode(self, obj: DictObject) -> DataObject:
        """Decodes a dictionary to the data object.

        Parameters
        ----------
        obj : Dict[str, Any]
            The dictionary containing the data for the object.

        Returns
        -------
        DataObject
            The decoded data object.
        """

    @abstractmethod
    def encode(self, obj: DataObject) -> DictObject:
        """Encodes a data object to a dictionary.

        Parameters
        ----------
        obj : DataObject
            The object containing the data.

        Returns
        -------
        Dict[str, Any]
            The encoded data object in a dictionary.
        """

    def dumps(self, obj: DataObject) -> str:
        """Encodes a data object to stable JSON text: keys are sorted
        so identical objects always produce identical bytes.

        Parameters
        ----------
        obj : DataObject
            The object containing the data.

        Returns
        -------
        str
            The JSON text.
        """
        return json.dumps(self.encode(obj), indent = 4, sort_keys = True)

    def loads(self, text: str) -> DataObject:
        """Decodes a data object from JSON text.

        Parameters
        ----------
        text : str
            The JSON text.

        Returns
        -------
        DataObject
            The decoded data object.
        """
        return self.decode(json.loads(text))

    def read(self, path: str) -> DataObject:
        """Decodes a data object from a JSON file.

        Parameters
        ----------
        path : str
            The location of the JSON file.

        Returns
        -------
        DataObject
            The decoded data object.
        """
        with open(path, mode = 'r', encoding = 'UTF-8') as file:
            return self.decode(json.load(file))

    def write(self, path: str, obj: DataObject) -> None:
        """Encodes a data object into a JSON file.

        Parameters
        ----------
        path : str
            The location of the JSON file.
        obj : DataObject
            The object containing the data.
        """
        with open(path, mode = 'w', encoding = 'UTF-8', newline = '\n') as file:
            print(self.dumps(obj), file = file)
